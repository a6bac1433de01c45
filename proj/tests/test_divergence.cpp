#include "esn/divergence.hpp"

#include "esn/constraints.hpp"
#include "esn/experiment.hpp"
#include "esn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using esn::DivergenceSeries;
using esn::FitWindow;
using esn::InputSequence;
using esn::Matrix;
using esn::ReservoirParams;
using esn::Vector;

namespace {

DivergenceSeries synthetic(Eigen::Index len, double (*f)(double)) {
  DivergenceSeries s;
  s.distances.reserve(static_cast<std::size_t>(len));
  for (Eigen::Index t = 1; t <= len; ++t) {
    s.distances.push_back(f(static_cast<double>(t)));
  }
  return s;
}

double power_law(double t) { return 3.0 * std::pow(t, -0.5); }
double exponential(double t) { return 2.0 * std::exp(-0.1 * t); }

ReservoirParams identity_input_params(const Matrix& w,
                                      esn::TransferFunction f) {
  ReservoirParams p;
  p.W = w;
  p.w_in = Matrix::Identity(w.rows(), w.rows());
  p.transfer = f;
  return p;
}

}  // namespace

TEST_CASE("l1 distance is the entrywise absolute-difference sum") {
  Vector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(esn::l1_distance(a, a) == 0.0);
  CHECK(esn::l1_distance(a, b) == doctest::Approx(2.0));
  CHECK(esn::l1_distance(a, b) == esn::l1_distance(b, a));
  CHECK_THROWS_AS(esn::l1_distance(a, Vector::Zero(3)), std::invalid_argument);

  esn::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = rng.gaussian_matrix(4, 1);
    const Vector y = rng.gaussian_matrix(4, 1);
    const Vector z = rng.gaussian_matrix(4, 1);
    CHECK(esn::l1_distance(x, z) <=
          esn::l1_distance(x, y) + esn::l1_distance(y, z) + 1e-12);
    CHECK(esn::l1_distance(x, y) >= 0.0);
  }
}

TEST_CASE("run_twins without recurrence forgets in one step") {
  const Eigen::Index n = 2;
  const auto p = identity_input_params(Matrix::Zero(n, n),
                                       esn::TransferFunction::SinCritical);
  InputSequence a;
  a.inputs = Matrix::Zero(n, 20);
  InputSequence b = a;
  b.inputs(0, 4) = 1.5;  // single differing input
  const auto series =
      esn::run_twins(p, InputSequence{Matrix(n, 0), ""}, a, b, 10);
  REQUIRE(series.length() == 10);
  CHECK(series.at(1) > 0.0);
  for (Eigen::Index t = 2; t <= series.length(); ++t) {
    CHECK(series.at(t) == 0.0);
  }
}

TEST_CASE("run_twins rejects identical inputs") {
  const auto p = identity_input_params(Matrix::Zero(2, 2),
                                       esn::TransferFunction::SinCritical);
  InputSequence a;
  a.inputs = Matrix::Ones(2, 10);
  CHECK_THROWS_WITH_AS(esn::run_twins(p, InputSequence{Matrix(2, 0), ""}, a, a, 5),
                       doctest::Contains("no perturbation"),
                       std::invalid_argument);
}

TEST_CASE("run_twins reproduces its distance series bitwise") {
  esn::Rng rng(7);
  Matrix w = rng.gaussian_matrix(5, 5);
  w *= 0.8 / esn::largest_singular_value(w);
  ReservoirParams p;
  p.W = w;
  p.w_in = rng.uniform_matrix(5, 2, -0.5, 0.5);
  p.transfer = esn::TransferFunction::Tanh;
  InputSequence warmup;
  warmup.inputs = rng.gaussian_matrix(2, 50);
  InputSequence a;
  a.inputs = rng.gaussian_matrix(2, 300);
  InputSequence b = a;
  b.inputs(1, 0) += 1.0;
  const auto s1 = esn::run_twins(p, warmup, a, b, 250);
  const auto s2 = esn::run_twins(p, warmup, a, b, 250);
  CHECK(s1.distances == s2.distances);
}

TEST_CASE("sub-critical reservoirs forget exponentially fast") {
  // Spectral radius 0.9 with tanh: every single-perturbation series must
  // fall below 1e-12 within 500 iterations.
  esn::Rng rng(9);
  const Matrix w = 0.9 * esn::random_orthogonal(8, 11);
  ReservoirParams p;
  p.W = w;
  p.w_in = rng.uniform_matrix(8, 1, -0.5, 0.5);
  p.transfer = esn::TransferFunction::Tanh;
  for (int trial = 0; trial < 5; ++trial) {
    InputSequence warmup;
    warmup.inputs = rng.gaussian_matrix(1, 100);
    InputSequence a;
    a.inputs = rng.gaussian_matrix(1, 600);
    InputSequence b = a;
    b.inputs(0, 0) += 2.0;
    const auto series = esn::run_twins(p, warmup, a, b, 600);
    Eigen::Index first_below = -1;
    for (Eigen::Index t = 1; t <= series.length(); ++t) {
      if (series.at(t) < 1e-12) {
        first_below = t;
        break;
      }
    }
    REQUIRE(first_below > 0);
    CHECK(first_below <= 500);
  }
}

TEST_CASE("power-law fit recovers an exact power law") {
  const auto series = synthetic(2000, power_law);
  const auto fit = esn::fit_power_law(series, FitWindow{10, 1000});
  CHECK(fit.model == esn::DecayModel::PowerLaw);
  CHECK(fit.exponent_or_rate == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.t_lo == 10);
  CHECK(fit.t_hi == 1000);
}

TEST_CASE("exponential fit recovers an exact exponential") {
  const auto series = synthetic(340, exponential);
  const auto fit = esn::fit_exponential(series, FitWindow{10, 300});
  CHECK(fit.model == esn::DecayModel::Exponential);
  CHECK(fit.exponent_or_rate == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cross-fits rank the true model higher") {
  const auto pl = synthetic(1200, power_law);
  CHECK(esn::fit_power_law(pl, FitWindow{10, 1000}).r_squared >
        esn::fit_exponential(pl, FitWindow{10, 1000}).r_squared);

  const auto ex = synthetic(340, exponential);
  CHECK(esn::fit_exponential(ex, FitWindow{10, 300}).r_squared >
        esn::fit_power_law(ex, FitWindow{10, 300}).r_squared);
}

TEST_CASE("power-law exponent survives multiplicative noise") {
  esn::Rng rng(13);
  DivergenceSeries noisy;
  for (int t = 1; t <= 2000; ++t) {
    noisy.distances.push_back(5.0 * std::pow(t, -0.7) *
                              (1.0 + rng.uniform(-0.01, 0.01)));
  }
  const auto fit = esn::fit_power_law(noisy, FitWindow{10, 1000});
  CHECK(fit.exponent_or_rate == doctest::Approx(-0.7).epsilon(0.05 / 0.7));
  CHECK(std::abs(fit.exponent_or_rate - (-0.7)) <= 0.05);
}

TEST_CASE("classify_decay picks the better regime and flags ties") {
  CHECK(esn::classify_decay(synthetic(1200, power_law), FitWindow{10, 1000})
            .model == esn::DecayModel::PowerLaw);
  const auto exp_fit =
      esn::classify_decay(synthetic(340, exponential), FitWindow{10, 300});
  CHECK(exp_fit.model == esn::DecayModel::Exponential);
  CHECK_FALSE(exp_fit.tie);

  const auto flat = synthetic(100, [](double) { return 0.25; });
  const auto tie_fit = esn::classify_decay(flat, FitWindow{10, 90});
  CHECK(tie_fit.model == esn::DecayModel::Exponential);
  CHECK(tie_fit.tie);
  CHECK(std::abs(tie_fit.exponent_or_rate) <= 1e-12);
}

TEST_CASE("fit windows are validated") {
  const auto series = synthetic(100, power_law);
  CHECK_THROWS_AS(esn::fit_power_law(series, FitWindow{0, 50}),
                  std::invalid_argument);
  CHECK_THROWS_AS(esn::fit_power_law(series, FitWindow{50, 50}),
                  std::invalid_argument);
  CHECK_THROWS_AS(esn::fit_power_law(series, FitWindow{10, 101}),
                  std::invalid_argument);

  // Sub-floor distances are excluded; too few usable samples is an error.
  auto tiny = synthetic(100, power_law);
  for (std::size_t i = 20; i < tiny.distances.size(); ++i) {
    tiny.distances[i] = 1e-16;
  }
  CHECK_THROWS_WITH_AS(esn::fit_power_law(tiny, FitWindow{15, 100}),
                       doctest::Contains("usable samples"),
                       std::invalid_argument);

  CHECK(esn::default_fit_window(series).t_lo == 10);
  CHECK(esn::default_fit_window(series).t_hi == 50);
}

TEST_CASE("signal_window caps the fit where the series stops carrying signal") {
  // Exponential decay from 10 into a flat noise floor at 1e-13: the window
  // must end where the decay crosses 1e-12 * peak = 1e-11.
  DivergenceSeries s;
  for (int t = 1; t <= 500; ++t) {
    s.distances.push_back(std::max(10.0 * std::exp(-0.2 * t), 1e-13));
  }
  const auto w = esn::signal_window(s);
  CHECK(w.t_lo == 10);
  // Peak is d(1) = 10 e^{-0.2}, so the cutoff is at
  // 10 e^{-0.2 t} >= 1e-12 * 10 e^{-0.2}  <=>  t <= 1 + 5 ln(1e12) = 139.2.
  CHECK(w.t_hi == 139);

  // A pure power law keeps signal to the end.
  const auto full = esn::signal_window(synthetic(300, power_law));
  CHECK(full.t_hi == 300);
}

TEST_CASE("trained reduced model forgets with a monotone decaying trend") {
  // The 10-point moving average of the twin distance wiggles by a few
  // percent (the L1 norm of a rotating difference vector is not constant),
  // so strict step-by-step monotonicity is not attainable; the trend is
  // monotone: no local increase beyond 6%, and a large decrease across the
  // window overall.
  esn::ExperimentConfig cfg =
      esn::default_config(esn::ExperimentKind::Reduced);
  cfg.iterations = 2000;
  cfg.horizon = 2000;
  const auto trace = esn::train_experiment(cfg);
  const auto twins = esn::build_twin_inputs(cfg);
  const auto series =
      esn::run_twins(trace.final_params, trace.final_state, twins.warmup,
                     twins.a, twins.b, cfg.horizon);
  std::vector<double> ma;
  for (Eigen::Index k = 1; k + 9 <= series.length(); ++k) {
    double sum = 0.0;
    for (Eigen::Index t = k; t < k + 10; ++t) sum += series.at(t);
    ma.push_back(sum / 10.0);
  }
  for (std::size_t k = 10; k + 1 < ma.size(); ++k) {
    CHECK(ma[k + 1] <= ma[k] * 1.06);
  }
  CHECK(ma.back() <= 0.2 * ma[10]);
}

TEST_CASE("divergence CSV round-trips and validates") {
  const auto series = synthetic(25, power_law);
  std::stringstream ss;
  esn::write_divergence_csv(ss, series);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,distance");
  ss.seekg(0);
  const auto back = esn::read_divergence_csv(ss, "test");
  CHECK(back.distances == series.distances);

  std::stringstream bad("t,distance\n2,0.5\n");
  CHECK_THROWS_AS(esn::read_divergence_csv(bad, "test"), esn::ConfigError);
  std::stringstream bad2("nope\n");
  CHECK_THROWS_AS(esn::read_divergence_csv(bad2, "test"), esn::ConfigError);
}

TEST_CASE("fit JSON carries the documented fields") {
  const auto fit =
      esn::fit_power_law(synthetic(2000, power_law), FitWindow{10, 1000});
  const auto j = esn::fit_to_json(fit);
  CHECK(j.at("model") == "power_law");
  CHECK(j.at("slope").get<double>() == doctest::Approx(-0.5));
  CHECK(j.at("intercept").get<double>() == doctest::Approx(3.0));
  CHECK(j.at("window").at("t_lo") == 10);
  CHECK(j.at("window").at("t_hi") == 1000);
  CHECK(j.at("r_squared").get<double>() == doctest::Approx(1.0));
  CHECK(j.at("tie") == false);
}
