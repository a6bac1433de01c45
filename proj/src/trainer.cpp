#include "esn/trainer.hpp"

#include "esn/matrix_io.hpp"
#include "esn/rng.hpp"

#include <cmath>
#include <ostream>

namespace esn {

void TrainConfig::validate() const {
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
  }
  if (iterations < 1) {
    throw std::invalid_argument("TrainConfig: iterations must be >= 1");
  }
  if (!(s_start > 0.0) || s_start > s_end || s_end > 1.0) {
    throw std::invalid_argument(
        "TrainConfig: spectral scales must satisfy 0 < s_start <= s_end <= 1");
  }
  if (ramp_iterations < 0 || ramp_iterations > iterations) {
    throw std::invalid_argument(
        "TrainConfig: ramp_iterations must lie in [0, iterations]");
  }
  if (transient < 0) {
    throw std::invalid_argument("TrainConfig: transient must be >= 0");
  }
}

double instantaneous_cost(const Vector& x_lin) {
  return x_lin.array().cos().square().sum();
}

GradientPair gradients(const ReservoirParams& params, const Vector& prev_x,
                       const Vector& u, const Vector& x_lin) {
  if (prev_x.size() != params.size() || x_lin.size() != params.size()) {
    throw std::invalid_argument(
        "gradients: state vectors have lengths " + std::to_string(prev_x.size()) +
        "/" + std::to_string(x_lin.size()) + ", expected " +
        std::to_string(params.size()));
  }
  if (u.size() != params.input_dim()) {
    throw std::invalid_argument("gradients: input has length " +
                                std::to_string(u.size()) + ", expected " +
                                std::to_string(params.input_dim()));
  }
  const Vector s =
      2.0 * x_lin.array().cos() * x_lin.array().sin();  // -d cost / d x_lin
  GradientPair g;
  g.dW = s * prev_x.transpose();
  g.dw_in = s * u.transpose();
  return g;
}

namespace {

// One online iteration at a given operative scale: the gradient is taken on
// the pre-update pre-activations, the weights are updated and re-projected,
// and the state advance is then emitted with the updated weights. Emitting
// with the updated weights is what lets the learned solution persist at the
// critical point: the correction damps the very deviation it was computed
// from, instead of landing one iteration late after the recurrent rotation.
TrainStepResult train_tick(const ReservoirParams& params,
                           const ReservoirState& state, const Vector& u,
                           double learning_rate, ConstraintMode constraint,
                           double scale) {
  ReservoirParams operative = params;
  operative.W = scale * params.W;
  const ReservoirState preliminary = step(operative, state, u);
  const GradientPair g = gradients(operative, state.x, u, preliminary.x_lin);

  TrainStepResult out;
  out.params = params;
  out.params.W =
      apply_constraint(operative.W + learning_rate * g.dW, constraint);
  out.params.w_in = params.w_in + learning_rate * g.dw_in;

  operative.W = scale * out.params.W;
  operative.w_in = out.params.w_in;
  out.state = step(operative, state, u);
  return out;
}

}  // namespace

TrainStepResult train_step(const ReservoirParams& params,
                           const ReservoirState& state, const Vector& u,
                           double learning_rate, ConstraintMode constraint) {
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("train_step: learning_rate must be >= 0");
  }
  return train_tick(params, state, u, learning_rate, constraint, 1.0);
}

double spectral_scale_at(const TrainConfig& cfg, int t) {
  if (t < 0) {
    throw std::invalid_argument("spectral_scale_at: iteration must be >= 0");
  }
  if (cfg.ramp_iterations == 0) return cfg.s_end;
  const double frac =
      static_cast<double>(std::min(t, cfg.ramp_iterations)) / cfg.ramp_iterations;
  return cfg.s_start * std::pow(cfg.s_end / cfg.s_start, frac);
}

namespace {

// The sub-unit scale applies where it leaves the stored matrix on its
// manifold after rescaling back: orthogonal and general modes. Skew
// projection re-normalizes the spectrum each step regardless.
bool scale_applies(ConstraintMode mode) {
  return mode == ConstraintMode::Orthogonal ||
         mode == ConstraintMode::GeneralUnitSpectralRadius;
}

}  // namespace

TrainTrace train(ReservoirParams params, const InputSequence& input,
                 const TrainConfig& cfg) {
  cfg.validate();
  params.validate();
  if (input.dim() != params.input_dim()) {
    throw std::invalid_argument("train: input dimension " +
                                std::to_string(input.dim()) + " does not match w_in (" +
                                shape_string(params.w_in) + ")");
  }
  if (input.length() < cfg.iterations) {
    throw std::invalid_argument(
        "train: input sequence has " + std::to_string(input.length()) +
        " steps, fewer than iterations=" + std::to_string(cfg.iterations));
  }

  params.W = apply_constraint(params.W, cfg.constraint);
  ReservoirState state = ReservoirState::zero(params.size());
  TrainTrace trace;
  trace.costs.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int t = 0; t < cfg.iterations; ++t) {
    const double s =
        scale_applies(cfg.constraint) ? spectral_scale_at(cfg, t) : 1.0;
    TrainStepResult r = train_tick(params, state, input.inputs.col(t),
                                   cfg.learning_rate, cfg.constraint, s);
    const double cost = instantaneous_cost(r.state.x_lin);
    if (!std::isfinite(cost)) {
      throw NumericError("train: non-finite cost at iteration " +
                         std::to_string(t));
    }
    trace.costs.push_back(cost);
    params = std::move(r.params);  // W stays at unit scale on the manifold
    state = std::move(r.state);
  }

  trace.final_params = std::move(params);
  trace.final_state = std::move(state);
  return trace;
}

double trailing_mean_cost(const TrainTrace& trace, std::size_t window) {
  if (trace.costs.empty() || window == 0) {
    throw std::invalid_argument("trailing_mean_cost: empty trace or window");
  }
  const std::size_t n = std::min(window, trace.costs.size());
  double sum = 0.0;
  for (std::size_t i = trace.costs.size() - n; i < trace.costs.size(); ++i) {
    sum += trace.costs[i];
  }
  return sum / static_cast<double>(n);
}

ReservoirParams initial_params(Eigen::Index n, Eigen::Index input_dim,
                               ConstraintMode constraint, TransferFunction f,
                               std::uint64_t seed) {
  if (n < 1 || input_dim < 1) {
    throw std::invalid_argument("initial_params: dimensions must be >= 1");
  }
  ReservoirParams params;
  const Matrix q = random_orthogonal(n, split_seed(seed, "init.W"));
  params.W = (constraint == ConstraintMode::SkewSymmetricUnitSpectrum)
                 ? project_skew_unit(q)
                 : q;  // orthogonal already has unit spectral radius
  Rng rng(split_seed(seed, "init.w_in"));
  params.w_in = rng.uniform_matrix(n, input_dim, -0.5, 0.5);
  params.transfer = f;
  return params;
}

void write_train_trace_csv(std::ostream& out, const TrainTrace& trace) {
  out << "t,cost\n";
  for (std::size_t t = 0; t < trace.costs.size(); ++t) {
    out << t << ',' << format_double(trace.costs[t]) << '\n';
  }
}

}  // namespace esn
