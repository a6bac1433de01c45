#include "esn/divergence.hpp"

#include "esn/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace esn {

std::string to_string(DecayModel model) {
  switch (model) {
    case DecayModel::PowerLaw:
      return "power_law";
    case DecayModel::Exponential:
      return "exponential";
  }
  throw std::invalid_argument("unknown DecayModel");
}

FitWindow default_fit_window(const DivergenceSeries& series) {
  return FitWindow{10, static_cast<int>(series.length() / 2)};
}

FitWindow signal_window(const DivergenceSeries& series, int t_lo) {
  double peak = 0.0;
  for (double d : series.distances) peak = std::max(peak, d);
  const double floor = std::max(kDistanceFloor, 1e-12 * peak);
  int last = 0;
  for (Eigen::Index t = 1; t <= series.length(); ++t) {
    if (series.at(t) >= floor) last = static_cast<int>(t);
  }
  return FitWindow{t_lo, last};
}

double l1_distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("l1_distance: lengths differ (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  return (x - y).cwiseAbs().sum();
}

DivergenceSeries run_twins(const ReservoirParams& params,
                           const ReservoirState& initial,
                           const InputSequence& warmup,
                           const InputSequence& input_a,
                           const InputSequence& input_b, Eigen::Index horizon) {
  params.validate();
  if (input_a.length() != input_b.length() ||
      input_a.dim() != input_b.dim()) {
    throw std::invalid_argument("run_twins: twin inputs must have equal shape");
  }
  if (horizon < 1) {
    throw std::invalid_argument("run_twins: horizon must be >= 1");
  }

  // First iteration at which the twins see different inputs.
  Eigen::Index first_diff = -1;
  for (Eigen::Index t = 0; t < input_a.length(); ++t) {
    if (input_a.inputs.col(t) != input_b.inputs.col(t)) {
      first_diff = t;
      break;
    }
  }
  if (first_diff < 0) {
    throw std::invalid_argument("run_twins: no perturbation found");
  }

  ReservoirState state = initial;
  for (Eigen::Index t = 0; t < warmup.length(); ++t) {
    state = step(params, state, warmup.inputs.col(t));
  }

  ReservoirState state_a = state;
  ReservoirState state_b = state;
  DivergenceSeries series;
  series.distances.reserve(static_cast<std::size_t>(
      std::min(horizon, input_a.length() - first_diff)));
  for (Eigen::Index t = 0; t < input_a.length(); ++t) {
    state_a = step(params, state_a, input_a.inputs.col(t));
    state_b = step(params, state_b, input_b.inputs.col(t));
    if (t < first_diff) continue;
    series.distances.push_back(l1_distance(state_a.x, state_b.x));
    if (series.length() == horizon) break;
  }
  if (series.distances.front() <= 0.0) {
    throw std::invalid_argument(
        "run_twins: perturbation did not register (zero initial distance)");
  }
  return series;
}

DivergenceSeries run_twins(const ReservoirParams& params,
                           const InputSequence& warmup,
                           const InputSequence& input_a,
                           const InputSequence& input_b, Eigen::Index horizon) {
  return run_twins(params, ReservoirState::zero(params.size()), warmup,
                   input_a, input_b, horizon);
}

namespace {

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};

LineFit least_squares(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = std::max(0.0, syy - fit.slope * sxy);
  if (syy < 1e-30) {
    // Flat data: a horizontal line explains it perfectly.
    fit.r_squared = (ss_res < 1e-30) ? 1.0 : 0.0;
  } else {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

DecayFit fit_decay(const DivergenceSeries& series, FitWindow window,
                   DecayModel model, const std::string& who) {
  if (window.t_lo < 1 || window.t_lo >= window.t_hi ||
      window.t_hi > series.length()) {
    throw std::invalid_argument(
        who + ": window [" + std::to_string(window.t_lo) + ", " +
        std::to_string(window.t_hi) + "] invalid for series of length " +
        std::to_string(series.length()));
  }
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(window.t_hi - window.t_lo + 1));
  ys.reserve(xs.capacity());
  for (int t = window.t_lo; t <= window.t_hi; ++t) {
    const double d = series.at(t);
    if (d < kDistanceFloor) continue;  // log is meaningless at the fp floor
    xs.push_back(model == DecayModel::PowerLaw ? std::log(static_cast<double>(t))
                                               : static_cast<double>(t));
    ys.push_back(std::log(d));
  }
  if (xs.size() < 10) {
    throw std::invalid_argument(
        who + ": window [" + std::to_string(window.t_lo) + ", " +
        std::to_string(window.t_hi) + "] contains only " +
        std::to_string(xs.size()) +
        " usable samples (>= 10 required; nonpositive distances and "
        "distances below 1e-15 are excluded)");
  }
  const LineFit line = least_squares(xs, ys);
  DecayFit fit;
  fit.model = model;
  fit.exponent_or_rate = line.slope;
  fit.intercept = std::exp(line.intercept);
  fit.t_lo = window.t_lo;
  fit.t_hi = window.t_hi;
  fit.r_squared = line.r_squared;
  return fit;
}

}  // namespace

DecayFit fit_power_law(const DivergenceSeries& series, FitWindow window) {
  return fit_decay(series, window, DecayModel::PowerLaw, "fit_power_law");
}

DecayFit fit_exponential(const DivergenceSeries& series, FitWindow window) {
  return fit_decay(series, window, DecayModel::Exponential, "fit_exponential");
}

DecayFit classify_decay(const DivergenceSeries& series, FitWindow window) {
  const DecayFit power = fit_power_law(series, window);
  DecayFit exponential = fit_exponential(series, window);
  if (std::abs(power.r_squared - exponential.r_squared) < 1e-6) {
    exponential.tie = true;
    return exponential;
  }
  return power.r_squared > exponential.r_squared ? power : exponential;
}

void write_divergence_csv(std::ostream& out, const DivergenceSeries& series) {
  out << "t,distance\n";
  for (Eigen::Index t = 1; t <= series.length(); ++t) {
    out << t << ',' << format_double(series.at(t)) << '\n';
  }
}

DivergenceSeries read_divergence_csv(std::istream& in,
                                     const std::string& context) {
  std::string line;
  if (!std::getline(in, line) || line != "t,distance") {
    throw ConfigError(context + ": expected header 't,distance'");
  }
  DivergenceSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(context + ": line " + std::to_string(line_no) +
                        ": expected 't,distance'");
    }
    const std::string where = context + ": line " + std::to_string(line_no);
    const double t = parse_double(line.substr(0, comma), where);
    if (t != static_cast<double>(series.distances.size() + 1)) {
      throw ConfigError(where + ": iterations must run 1,2,3,...");
    }
    series.distances.push_back(parse_double(line.substr(comma + 1), where));
  }
  if (series.distances.empty()) {
    throw ConfigError(context + ": no data rows");
  }
  return series;
}

nlohmann::json fit_to_json(const DecayFit& fit) {
  return nlohmann::json{
      {"model", to_string(fit.model)},
      {"slope", fit.exponent_or_rate},
      {"intercept", fit.intercept},
      {"window", {{"t_lo", fit.t_lo}, {"t_hi", fit.t_hi}}},
      {"r_squared", fit.r_squared},
      {"tie", fit.tie},
  };
}

}  // namespace esn
