#include "esn/reservoir.hpp"

#include "esn/matrix_io.hpp"

#include <cmath>
#include <ostream>

namespace esn {

std::string to_string(TransferFunction f) {
  switch (f) {
    case TransferFunction::Tanh:
      return "tanh";
    case TransferFunction::SinCritical:
      return "sin-critical";
  }
  throw std::invalid_argument("unknown TransferFunction");
}

TransferFunction transfer_function_from_string(const std::string& name) {
  if (name == "tanh") return TransferFunction::Tanh;
  if (name == "sin-critical") return TransferFunction::SinCritical;
  throw std::invalid_argument("unknown transfer function '" + name +
                              "' (expected one of: tanh, sin-critical)");
}

double transfer(TransferFunction f, double x) {
  switch (f) {
    case TransferFunction::Tanh:
      return std::tanh(x);
    case TransferFunction::SinCritical:
      return 0.5 * x - 0.25 * std::sin(2.0 * x);
  }
  throw std::invalid_argument("unknown TransferFunction");
}

double transfer_derivative(TransferFunction f, double x) {
  switch (f) {
    case TransferFunction::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case TransferFunction::SinCritical:
      return 0.5 - 0.5 * std::cos(2.0 * x);
  }
  throw std::invalid_argument("unknown TransferFunction");
}

Vector transfer(TransferFunction f, const Vector& x) {
  return x.unaryExpr([f](double v) { return transfer(f, v); });
}

void ReservoirParams::validate() const {
  require_square(W, "ReservoirParams.W");
  require_finite(W, "ReservoirParams.W");
  require_finite(w_in, "ReservoirParams.w_in");
  if (w_in.rows() != W.rows()) {
    throw std::invalid_argument("ReservoirParams: w_in has " +
                                std::to_string(w_in.rows()) +
                                " rows, expected " + std::to_string(W.rows()));
  }
  if (w_in.cols() < 1) {
    throw std::invalid_argument("ReservoirParams: w_in must have >= 1 column");
  }
  if (w_out.size() > 0) {
    require_finite(w_out, "ReservoirParams.w_out");
    if (w_out.cols() != W.rows()) {
      throw std::invalid_argument(
          "ReservoirParams: w_out has " + std::to_string(w_out.cols()) +
          " columns, expected " + std::to_string(W.rows()));
    }
  }
}

ReservoirState ReservoirState::zero(Eigen::Index n) {
  ReservoirState s;
  s.x = Vector::Zero(n);
  s.x_lin = Vector::Zero(n);
  return s;
}

ReservoirState step(const ReservoirParams& params, const ReservoirState& state,
                    const Vector& u) {
  if (state.x.size() != params.size()) {
    throw std::invalid_argument(
        "step: state has length " + std::to_string(state.x.size()) +
        ", expected " + std::to_string(params.size()) + " (W is " +
        shape_string(params.W) + ")");
  }
  if (u.size() != params.input_dim()) {
    throw std::invalid_argument(
        "step: input has length " + std::to_string(u.size()) + ", expected " +
        std::to_string(params.input_dim()) + " (w_in is " +
        shape_string(params.w_in) + ")");
  }
  ReservoirState next;
  next.x_lin = params.W * state.x + params.w_in * u;
  next.x = transfer(params.transfer, next.x_lin);
  return next;
}

Vector readout(const ReservoirParams& params, const ReservoirState& state) {
  if (params.w_out.size() == 0) {
    throw std::invalid_argument("readout: params carry no output matrix");
  }
  if (state.x.size() != params.w_out.cols()) {
    throw std::invalid_argument(
        "readout: state has length " + std::to_string(state.x.size()) +
        ", expected " + std::to_string(params.w_out.cols()) + " (w_out is " +
        shape_string(params.w_out) + ")");
  }
  return params.w_out * state.x;
}

Matrix jacobian(const ReservoirParams& params, const Vector& x_lin) {
  if (x_lin.size() != params.size()) {
    throw std::invalid_argument(
        "jacobian: x_lin has length " + std::to_string(x_lin.size()) +
        ", expected " + std::to_string(params.size()));
  }
  Matrix j = params.W;
  for (Eigen::Index i = 0; i < j.rows(); ++i) {
    j.row(i) *= transfer_derivative(params.transfer, x_lin(i));
  }
  return j;
}

double contraction_factor(const ReservoirParams& params,
                          const ReservoirState& a, const ReservoirState& b,
                          const Vector& u) {
  const double denom = (b.x - a.x).norm();
  if (denom == 0.0) {
    throw std::invalid_argument(
        "contraction_factor: zero denominator (states coincide)");
  }
  const double numer = (step(params, b, u).x - step(params, a, u).x).norm();
  return numer / denom;
}

double critical_distance(double x_lin_i) {
  // Critical set: pi(n + 1/2) for all integers n.
  double r = std::fmod(x_lin_i - M_PI_2, M_PI);
  if (r < 0.0) r += M_PI;
  return std::min(r, M_PI - r);
}

double critical_state_distance(const ReservoirState& state) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < state.x_lin.size(); ++i) {
    worst = std::max(worst, critical_distance(state.x_lin(i)));
  }
  return worst;
}

void write_trajectory_csv(std::ostream& out, const ReservoirParams& params,
                          ReservoirState state, const Matrix& inputs) {
  params.validate();
  const Eigen::Index n = params.size();
  out << 't';
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_lin_" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  out << '\n';
  for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
    state = step(params, state, inputs.col(t));
    out << t;
    for (Eigen::Index i = 0; i < n; ++i)
      out << ',' << format_double(state.x_lin(i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(state.x(i));
    out << '\n';
  }
}

}  // namespace esn
