#pragma once

#include "esn/reservoir.hpp"
#include "esn/sequences.hpp"
#include "esn/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace esn {

/// L1 distances between twin trajectories, indexed from the perturbation:
/// distances[0] is t = 1, the iteration at which the inputs first differ.
struct DivergenceSeries {
  std::vector<double> distances;
  std::string descriptor;

  Eigen::Index length() const {
    return static_cast<Eigen::Index>(distances.size());
  }
  /// Distance at 1-based iteration t.
  double at(Eigen::Index t) const {
    return distances.at(static_cast<std::size_t>(t - 1));
  }
};

enum class DecayModel { PowerLaw, Exponential };

std::string to_string(DecayModel model);

/// Least-squares fit of a decay regime on a window of iterations.
/// PowerLaw: d ~ intercept * t^exponent_or_rate (line in log-log).
/// Exponential: d ~ intercept * exp(exponent_or_rate * t) (line in log-lin).
struct DecayFit {
  DecayModel model;
  double exponent_or_rate;
  double intercept;
  int t_lo;
  int t_hi;
  double r_squared;  // of the regression in the fitted coordinates
  bool tie = false;  // set by classify_decay when both fits are equally good
};

struct FitWindow {
  int t_lo;
  int t_hi;
};

/// [10, length/2]: skips the immediate transient and the noisy tail.
FitWindow default_fit_window(const DivergenceSeries& series);

/// [t_lo, last iteration with d >= max(1e-15, 1e-12 * peak)]. Distances
/// twelve orders of magnitude below the series' own peak are amplified
/// rounding noise, not dynamics; fitting across them is meaningless. The
/// returned window may be empty (t_hi < t_lo) when the series collapses
/// immediately.
FitWindow signal_window(const DivergenceSeries& series, int t_lo = 10);

double l1_distance(const Vector& x, const Vector& y);

/// Runs two copies of a fixed network from the identical post-warmup state,
/// one on input_a and one on input_b, and records the L1 distance between
/// their activation vectors at every iteration from the first differing
/// input on. Records at most `horizon` distances. No learning takes place.
/// The warmup starts from `initial` (typically the state a training run
/// ended in); the two-argument form starts from the zero state.
DivergenceSeries run_twins(const ReservoirParams& params,
                           const ReservoirState& initial,
                           const InputSequence& warmup,
                           const InputSequence& input_a,
                           const InputSequence& input_b, Eigen::Index horizon);
DivergenceSeries run_twins(const ReservoirParams& params,
                           const InputSequence& warmup,
                           const InputSequence& input_a,
                           const InputSequence& input_b, Eigen::Index horizon);

/// Distances below this floor are excluded from fit windows; log of a value
/// at the double-precision floor carries no information.
inline constexpr double kDistanceFloor = 1e-15;

DecayFit fit_power_law(const DivergenceSeries& series, FitWindow window);
DecayFit fit_exponential(const DivergenceSeries& series, FitWindow window);

/// Runs both fits on the same window and returns the one with the higher
/// r_squared. A difference below 1e-6 counts as a tie and is reported as
/// Exponential with the tie flag set.
DecayFit classify_decay(const DivergenceSeries& series, FitWindow window);

/// CSV round-trip, header "t,distance" with t starting at 1.
void write_divergence_csv(std::ostream& out, const DivergenceSeries& series);
DivergenceSeries read_divergence_csv(std::istream& in,
                                     const std::string& context);

nlohmann::json fit_to_json(const DecayFit& fit);

}  // namespace esn
