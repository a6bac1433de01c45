#pragma once

#include "esn/constraints.hpp"
#include "esn/reservoir.hpp"
#include "esn/sequences.hpp"
#include "esn/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace esn {

/// Settings for one training run. The spectral scale ramps geometrically
/// from s_start to s_end over ramp_iterations and stays at s_end afterward;
/// it applies to the orthogonal and general (unit-spectral-radius) modes.
struct TrainConfig {
  double learning_rate = 0.01;
  int iterations = 5000;
  ConstraintMode constraint = ConstraintMode::Orthogonal;
  double s_start = 1.0;
  double s_end = 1.0;
  int ramp_iterations = 0;
  std::uint64_t seed = 0;
  int transient = 1000;  // iterations discarded before any evaluation

  void validate() const;
};

/// Per-iteration cost values plus the trained parameters. final_state is the
/// driven state at the end of training, for protocols that keep the network
/// running (restarting a critical reservoir from scratch would re-approach
/// its operating orbit only slowly).
struct TrainTrace {
  std::vector<double> costs;
  ReservoirParams final_params;
  ReservoirState final_state;
};

/// Anticipation cost at one time step: sum_i cos^2(x_lin_i). Vanishes
/// exactly when every pre-activation sits on the critical set pi(n + 1/2).
double instantaneous_cost(const Vector& x_lin);

/// Descent directions (the negative gradients of instantaneous_cost):
/// dW_ij = 2 cos(x_lin_i) sin(x_lin_i) prev_x_j and the analogous dw_in with
/// u_j. The caller supplies a consistent triple x_lin = W prev_x + w_in u.
struct GradientPair {
  Matrix dW;
  Matrix dw_in;
};
GradientPair gradients(const ReservoirParams& params, const Vector& prev_x,
                       const Vector& u, const Vector& x_lin);

/// One online update. The gradient is evaluated on the pre-update
/// pre-activations, W and w_in take their step, W is projected back onto the
/// constraint manifold, and the iteration's state advance is then emitted
/// with the updated weights. The returned W satisfies the constraint at unit
/// scale.
struct TrainStepResult {
  ReservoirParams params;
  ReservoirState state;
};
TrainStepResult train_step(const ReservoirParams& params,
                           const ReservoirState& state, const Vector& u,
                           double learning_rate, ConstraintMode constraint);

/// Geometric interpolation s(t) = s_start (s_end/s_start)^(min(t,ramp)/ramp);
/// returns s_end for all t when ramp_iterations is zero.
double spectral_scale_at(const TrainConfig& cfg, int t);

/// Runs train_step over the input sequence, rescaling the projected W by
/// s(t) each iteration (orthogonal and general modes). Records the
/// instantaneous cost per iteration and returns the final parameters with
/// the unit-scale constraint enforced.
TrainTrace train(ReservoirParams params, const InputSequence& input,
                 const TrainConfig& cfg);

/// Mean of the last `window` recorded costs (all of them if fewer).
double trailing_mean_cost(const TrainTrace& trace, std::size_t window);

/// Fresh parameters: a random orthogonal W (projected onto the requested
/// manifold) and i.i.d. uniform [-0.5, 0.5] input weights. Sub-seeds are
/// split off the given seed per consumer.
ReservoirParams initial_params(Eigen::Index n, Eigen::Index input_dim,
                               ConstraintMode constraint, TransferFunction f,
                               std::uint64_t seed);

/// CSV export, header "t,cost".
void write_train_trace_csv(std::ostream& out, const TrainTrace& trace);

}  // namespace esn
