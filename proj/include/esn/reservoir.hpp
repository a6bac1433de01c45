#pragma once

#include "esn/types.hpp"

#include <iosfwd>
#include <string>

namespace esn {

/// Neuron transfer function. SinCritical is theta(x) = 0.5 x - 0.25 sin(2x),
/// whose derivative reaches its maximum of 1 exactly at x = pi(n + 1/2); all
/// 2^N sign choices of [+-pi/2, ...] are critical network states. Tanh has a
/// single critical point at the origin.
enum class TransferFunction { Tanh, SinCritical };

std::string to_string(TransferFunction f);
TransferFunction transfer_function_from_string(const std::string& name);

double transfer(TransferFunction f, double x);
double transfer_derivative(TransferFunction f, double x);
Vector transfer(TransferFunction f, const Vector& x);

/// The trainable object: recurrent weights, input weights, and an optional
/// readout. The readout is carried for completeness but never trained here.
struct ReservoirParams {
  Matrix W;      // N x N recurrent weights
  Matrix w_in;   // N x M input weights
  Matrix w_out;  // optional readout (K x N); empty when absent
  TransferFunction transfer = TransferFunction::SinCritical;

  Eigen::Index size() const { return W.rows(); }
  Eigen::Index input_dim() const { return w_in.cols(); }

  /// Shape and finiteness checks; throws std::invalid_argument.
  void validate() const;
};

/// Activations x = theta(x_lin) and the pre-activations that produced them.
struct ReservoirState {
  Vector x;
  Vector x_lin;

  static ReservoirState zero(Eigen::Index n);
};

/// One update: x_lin' = W x + w_in u, x' = theta(x_lin'). The input u_t
/// enters the same iteration it is presented.
ReservoirState step(const ReservoirParams& params, const ReservoirState& state,
                    const Vector& u);

/// o = w_out x. Requires a readout matrix to be present.
Vector readout(const ReservoirParams& params, const ReservoirState& state);

/// J_ij = theta'(x_lin_i) W_ij (row-scaled recurrent matrix).
Matrix jacobian(const ReservoirParams& params, const Vector& x_lin);

/// One-step Euclidean distance ratio ||step(b) - step(a)||_2 / ||b - a||_2
/// under a shared input. Bounded by the spectral norm of the Jacobian for
/// infinitesimal offsets.
double contraction_factor(const ReservoirParams& params,
                          const ReservoirState& a, const ReservoirState& b,
                          const Vector& u);

/// Distance of a scalar pre-activation to the nearest pi(n + 1/2).
double critical_distance(double x_lin_i);

/// max_i critical_distance(x_lin_i): how far the state is from the nearest
/// critical network state.
double critical_state_distance(const ReservoirState& state);

/// Drives the reservoir over the input columns and writes one CSV row per
/// iteration: "t,x_lin_0..x_lin_{N-1},x_0..x_{N-1}".
void write_trajectory_csv(std::ostream& out, const ReservoirParams& params,
                          ReservoirState state, const Matrix& inputs);

}  // namespace esn
