// Command-line front end: experiment runs, config validation,
// decay fitting and matrix probes. Exit codes: 0 success, 1 config error,
// 2 numeric failure.

#include "esn/constraints.hpp"
#include "esn/divergence.hpp"
#include "esn/experiment.hpp"
#include "esn/matrix_io.hpp"
#include "esn/rng.hpp"
#include "esn/trainer.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> horizon;
  int batch = 0;
  int jobs = 0;
};

esn::ExperimentConfig load_run_config(const RunOptions& opt) {
  esn::ExperimentConfig cfg = esn::validate_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.out_dir) cfg.out_dir = *opt.out_dir;
  if (opt.horizon) cfg.horizon = *opt.horizon;
  esn::validate_semantics(cfg);
  return cfg;
}

void print_result(const esn::ExperimentResult& result,
                  const esn::ExperimentConfig& cfg) {
  std::cout << "run " << result.run_id << " (" << esn::to_string(cfg.experiment)
            << ", seed " << cfg.seed << ") -> " << result.run_dir.string()
            << "\n";
  std::cout << "  final cost (mean of last 100 iterations): "
            << esn::format_double(esn::trailing_mean_cost(result.trace, 100))
            << "\n";
  if (result.fit) {
    std::cout << "  decay fit: " << esn::to_string(result.fit->model)
              << ", slope " << esn::format_double(result.fit->exponent_or_rate)
              << ", r^2 " << esn::format_double(result.fit->r_squared)
              << (result.fit->tie ? " (tie)" : "") << "\n";
  } else {
    std::cout << "  decay fit: none (distances collapsed below the fit floor)\n";
  }
}

int do_run(const RunOptions& opt) {
  const esn::ExperimentConfig base = load_run_config(opt);
  if (opt.batch <= 1) {
    print_result(esn::run_experiment(base), base);
    return kExitOk;
  }

  // Batch mode: independent seeds split off the root seed, one worker per
  // job, each run writing to its own subdirectory.
  std::vector<esn::ExperimentConfig> members;
  for (int i = 0; i < opt.batch; ++i) {
    esn::ExperimentConfig cfg = base;
    cfg.seed = esn::split_seed(base.seed, "batch-" + std::to_string(i));
    members.push_back(cfg);
  }
  const int jobs =
      opt.jobs > 0 ? opt.jobs
                   : std::min<int>(opt.batch,
                                   std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  std::atomic<int> worst{kExitOk};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= members.size()) return;
      try {
        const esn::ExperimentResult result = esn::run_experiment(members[i]);
        std::lock_guard lock(io_mutex);
        print_result(result, members[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock(io_mutex);
        std::cerr << "batch member " << i << " failed: " << e.what() << "\n";
        int code = dynamic_cast<const esn::ConfigError*>(&e) ? kExitConfig
                                                             : kExitNumeric;
        int cur = worst.load();
        while (cur < code && !worst.compare_exchange_weak(cur, code)) {
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

int do_validate(const std::string& path) {
  const esn::ExperimentConfig cfg = esn::validate_config(path);
  std::cout << "OK: " << path << "\n"
            << esn::config_to_json(cfg).dump(2) << "\n";
  return kExitOk;
}

int do_fit(const std::string& path, const std::vector<int>& window) {
  std::ifstream in(path);
  if (!in) throw esn::ConfigError("cannot open file: " + path);
  const esn::DivergenceSeries series = esn::read_divergence_csv(in, path);
  esn::FitWindow fw = esn::default_fit_window(series);
  if (!window.empty()) fw = esn::FitWindow{window[0], window[1]};
  const esn::DecayFit fit = esn::classify_decay(series, fw);
  std::cout << esn::fit_to_json(fit).dump(2) << "\n";
  return kExitOk;
}

int do_probe(const std::string& path) {
  const esn::Matrix m = esn::load_square_matrix(path);
  std::cout << "spectral_radius=" << esn::format_double(esn::spectral_radius(m))
            << "\n"
            << "largest_singular_value="
            << esn::format_double(esn::largest_singular_value(m)) << "\n"
            << "normality_defect="
            << esn::format_double(esn::normality_defect(m)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Input-anticipating critical echo state network experiments"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand(
      "run", "Train a reservoir and run its twin divergence experiment");
  run->add_option("config", run_opt.config_path, "JSON config file")->required();
  std::uint64_t seed_val = 0;
  std::string out_val;
  int horizon_val = 0;
  auto* seed_opt = run->add_option("--seed", seed_val, "Override the root seed");
  auto* out_opt = run->add_option("--out", out_val, "Override the output directory");
  auto* horizon_opt =
      run->add_option("--horizon", horizon_val, "Override the twin-run horizon")
          ->check(CLI::PositiveNumber);
  run->add_option("--batch", run_opt.batch,
                  "Run this many independent seeds split off the root seed");
  run->add_option("--jobs", run_opt.jobs, "Worker threads for batch mode");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", validate_path, "JSON config file")->required();

  std::string fit_path;
  std::vector<int> fit_window;
  auto* fit = app.add_subcommand("fit", "Classify decay in a divergence CSV");
  fit->add_option("csv", fit_path, "divergence.csv produced by run")->required();
  fit->add_option("--window", fit_window, "Fit window: lo hi (iterations)")
      ->expected(2);

  std::string probe_path;
  auto* probe = app.add_subcommand(
      "probe", "Print spectral radius, largest singular value and normality "
               "defect of a matrix file");
  probe->add_option("matrix", probe_path, "square matrix text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      if (*seed_opt) run_opt.seed = seed_val;
      if (*out_opt) run_opt.out_dir = out_val;
      if (*horizon_opt) run_opt.horizon = horizon_val;
      return do_run(run_opt);
    }
    if (validate->parsed()) return do_validate(validate_path);
    if (fit->parsed()) return do_fit(fit_path, fit_window);
    if (probe->parsed()) return do_probe(probe_path);
  } catch (const esn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const esn::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
