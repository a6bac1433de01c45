#include "esn/experiment.hpp"

#include "esn/matrix_io.hpp"
#include "esn/rng.hpp"
#include "esn/version.hpp"

#include <Eigen/Core>

#include <fstream>
#include <set>

namespace esn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Reduced:
      return "reduced";
    case ExperimentKind::GrammarViolation:
      return "grammar-violation";
    case ExperimentKind::GrammarSwap:
      return "grammar-swap";
    case ExperimentKind::GrammarPermanent:
      return "grammar-permanent";
  }
  throw std::invalid_argument("unknown ExperimentKind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "reduced") return ExperimentKind::Reduced;
  if (name == "grammar-violation") return ExperimentKind::GrammarViolation;
  if (name == "grammar-swap") return ExperimentKind::GrammarSwap;
  if (name == "grammar-permanent") return ExperimentKind::GrammarPermanent;
  throw ConfigError("unknown experiment '" + name +
                    "' (valid: reduced, grammar-violation, grammar-swap, "
                    "grammar-permanent)");
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig tc;
  tc.learning_rate = learning_rate;
  tc.iterations = iterations;
  tc.constraint = constraint;
  tc.s_start = s_start;
  tc.s_end = s_end;
  tc.ramp_iterations = ramp_iterations;
  tc.seed = seed;
  tc.transient = transient;
  return tc;
}

Eigen::Index experiment_input_dim(ExperimentKind kind) {
  return kind == ExperimentKind::Reduced ? 1 : 2;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  if (kind == ExperimentKind::Reduced) {
    cfg.n = 8;
    cfg.constraint = ConstraintMode::Orthogonal;
    cfg.learning_rate = 0.01;
    cfg.iterations = 5000;
    cfg.s_start = 1.0;
    cfg.s_end = 1.0;
    cfg.ramp_iterations = 0;
  } else {
    cfg.n = 15;
    cfg.constraint = ConstraintMode::GeneralUnitSpectralRadius;
    cfg.learning_rate = 0.009;
    cfg.iterations = 20000;
    cfg.s_start = 0.8;
    cfg.s_end = 1.0;
    cfg.ramp_iterations = 7500;
  }
  cfg.transient = 1000;
  cfg.horizon = 10000;
  cfg.seed = 1;
  cfg.out_dir = "runs";
  return cfg;
}

void validate_semantics(const ExperimentConfig& cfg) {
  if (cfg.n < 1) {
    throw ConfigError("config: n must be >= 1, got " + std::to_string(cfg.n));
  }
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("config: learning_rate must be >= 0");
  }
  if (cfg.iterations < 1) {
    throw ConfigError("config: iterations must be >= 1, got " +
                      std::to_string(cfg.iterations));
  }
  if (!(cfg.s_start > 0.0) || cfg.s_start > 1.0) {
    throw ConfigError("config: s_start must lie in (0, 1], got " +
                      format_double(cfg.s_start));
  }
  if (cfg.s_end < cfg.s_start) {
    throw ConfigError("config: s_end (" + format_double(cfg.s_end) +
                      ") must be >= s_start (" + format_double(cfg.s_start) +
                      ")");
  }
  if (cfg.s_end > 1.0) {
    throw ConfigError("config: s_end must be <= 1, got " +
                      format_double(cfg.s_end));
  }
  if (cfg.ramp_iterations < 0 || cfg.ramp_iterations > cfg.iterations) {
    throw ConfigError("config: ramp_iterations must lie in [0, iterations], got " +
                      std::to_string(cfg.ramp_iterations));
  }
  if (cfg.transient < 0) {
    throw ConfigError("config: transient must be >= 0, got " +
                      std::to_string(cfg.transient));
  }
  if (cfg.experiment != ExperimentKind::Reduced && cfg.transient % 4 != 0) {
    throw ConfigError(
        "config: transient must be a multiple of 4 for grammar experiments "
        "(the stimulus advances in 4-token blocks), got " +
        std::to_string(cfg.transient));
  }
  if (cfg.experiment != ExperimentKind::Reduced && cfg.iterations % 4 != 0) {
    throw ConfigError(
        "config: iterations must be a multiple of 4 for grammar experiments "
        "(training must stop on a block boundary), got " +
        std::to_string(cfg.iterations));
  }
  if (cfg.horizon < 1) {
    throw ConfigError("config: horizon must be >= 1, got " +
                      std::to_string(cfg.horizon));
  }
}

namespace {

const std::set<std::string> kKnownFields = {
    "experiment", "n",         "constraint",      "learning_rate",
    "iterations", "s_start",   "s_end",           "ramp_iterations",
    "transient",  "horizon",   "seed",            "out_dir",
};

int get_int(const json& j, const std::string& field, int fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  if (!v.is_number_integer()) {
    throw ConfigError("config: field '" + field + "' must be an integer");
  }
  return v.get<int>();
}

double get_double(const json& j, const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  if (!v.is_number()) {
    throw ConfigError("config: field '" + field + "' must be a number");
  }
  return v.get<double>();
}

std::string get_string(const json& j, const std::string& field,
                       const std::string& fallback) {
  if (!j.contains(field)) return fallback;
  const auto& v = j.at(field);
  if (!v.is_string()) {
    throw ConfigError("config: field '" + field + "' must be a string");
  }
  return v.get<std::string>();
}

std::uint64_t get_seed(const json& j, std::uint64_t fallback) {
  if (!j.contains("seed")) return fallback;
  const auto& v = j.at("seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto s = v.get<std::int64_t>();
    if (s >= 0) return static_cast<std::uint64_t>(s);
  }
  throw ConfigError("config: field 'seed' must be a non-negative integer");
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnownFields.count(key)) {
      std::string valid;
      for (const auto& f : kKnownFields) valid += (valid.empty() ? "" : ", ") + f;
      throw ConfigError("config: unknown field '" + key + "' (valid fields: " +
                        valid + ")");
    }
  }
  if (!j.contains("experiment")) {
    throw ConfigError(
        "config: missing required field 'experiment' (valid: reduced, "
        "grammar-violation, grammar-swap, grammar-permanent)");
  }
  ExperimentConfig cfg =
      default_config(experiment_kind_from_string(get_string(j, "experiment", "")));
  cfg.n = get_int(j, "n", cfg.n);
  if (j.contains("constraint")) {
    try {
      cfg.constraint =
          constraint_mode_from_string(get_string(j, "constraint", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: field 'constraint': ") + e.what());
    }
  }
  cfg.learning_rate = get_double(j, "learning_rate", cfg.learning_rate);
  cfg.iterations = get_int(j, "iterations", cfg.iterations);
  cfg.s_start = get_double(j, "s_start", cfg.s_start);
  cfg.s_end = get_double(j, "s_end", cfg.s_end);
  cfg.ramp_iterations = get_int(j, "ramp_iterations", cfg.ramp_iterations);
  cfg.transient = get_int(j, "transient", cfg.transient);
  cfg.horizon = get_int(j, "horizon", static_cast<int>(cfg.horizon));
  cfg.seed = get_seed(j, cfg.seed);
  cfg.out_dir = get_string(j, "out_dir", cfg.out_dir.string());
  validate_semantics(cfg);
  return cfg;
}

ExperimentConfig validate_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the failure; recover line/column.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(path.string() + ": parse error at line " +
                      std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{
      {"experiment", to_string(cfg.experiment)},
      {"n", cfg.n},
      {"constraint", to_string(cfg.constraint)},
      {"learning_rate", cfg.learning_rate},
      {"iterations", cfg.iterations},
      {"s_start", cfg.s_start},
      {"s_end", cfg.s_end},
      {"ramp_iterations", cfg.ramp_iterations},
      {"transient", cfg.transient},
      {"horizon", static_cast<std::int64_t>(cfg.horizon)},
      {"seed", cfg.seed},
  };
}

std::string run_identifier(const ExperimentConfig& cfg) {
  const std::string canon = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : canon) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

TrainTrace train_experiment(const ExperimentConfig& cfg) {
  validate_semantics(cfg);
  const Eigen::Index m = experiment_input_dim(cfg.experiment);
  const ReservoirParams params0 =
      initial_params(cfg.n, m, cfg.constraint, TransferFunction::SinCritical,
                     split_seed(cfg.seed, "init"));
  const InputSequence input =
      cfg.experiment == ExperimentKind::Reduced
          ? alternating_sequence(cfg.iterations)
          : grammar_sequence((cfg.iterations + 3) / 4 + 1,
                             split_seed(cfg.seed, "train.input"));
  return train(params0, input, cfg.train_config());
}

TwinInputs build_twin_inputs(const ExperimentConfig& cfg) {
  validate_semantics(cfg);
  TwinInputs twins;
  if (cfg.experiment == ExperimentKind::Reduced) {
    // Continue the alternation with the phase the training stream ended on.
    const Eigen::Index phase = cfg.iterations % 2;
    const Eigen::Index total = phase + cfg.transient + cfg.horizon + 8;
    const InputSequence full = alternating_sequence(total);
    twins.warmup = slice(full, phase, cfg.transient);
    twins.a = slice(full, phase + cfg.transient, total - phase - cfg.transient);
    twins.b = twins.a;
    // The unexpected event: -1 where +1 is due.
    twins.b.inputs(0, 0) = -twins.b.inputs(0, 0);
    return twins;
  }

  const Eigen::Index needed = cfg.transient + cfg.horizon + 8;
  const Eigen::Index blocks = (needed + 3) / 4 + 1;
  const InputSequence full =
      grammar_sequence(blocks, split_seed(cfg.seed, "eval.input"));
  twins.warmup = slice(full, 0, cfg.transient);
  const InputSequence rest =
      slice(full, cfg.transient, full.length() - cfg.transient);
  switch (cfg.experiment) {
    case ExperimentKind::GrammarViolation:
      twins.a = rest;
      twins.b = inject_violation(rest, 0);
      break;
    case ExperimentKind::GrammarSwap:
      twins.a = rest;
      twins.b = swap_block(rest, 0);
      break;
    case ExperimentKind::GrammarPermanent: {
      // Twin a sees one more correct block than twin b; both then read the
      // same permanently violated stream.
      const std::uint64_t vseed = split_seed(cfg.seed, "eval.violation");
      twins.a = permanent_violation(rest, 1, vseed);
      twins.b = permanent_violation(rest, 0, vseed);
      break;
    }
    default:
      throw std::invalid_argument("build_twin_inputs: unexpected kind");
  }
  return twins;
}

namespace {

std::ofstream open_artifact(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write artifact: " + path.string());
  return out;
}

json library_versions() {
  return json{
      {"critical_esn", kLibraryVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_semantics(cfg);
  ExperimentResult result;
  result.run_id = run_identifier(cfg);
  result.run_dir =
      cfg.out_dir / (to_string(cfg.experiment) + "-" + result.run_id);
  std::error_code ec;
  fs::create_directories(result.run_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " +
                      result.run_dir.string() + ": " + ec.message());
  }

  result.trace = train_experiment(cfg);
  {
    auto out = open_artifact(result.run_dir / "train_trace.csv");
    write_train_trace_csv(out, result.trace);
  }
  save_square_matrix((result.run_dir / "W.txt").string(),
                     result.trace.final_params.W);
  save_rect_matrix((result.run_dir / "w_in.txt").string(),
                   result.trace.final_params.w_in);

  const TwinInputs twins = build_twin_inputs(cfg);
  result.divergence =
      run_twins(result.trace.final_params, result.trace.final_state,
                twins.warmup, twins.a, twins.b, cfg.horizon);
  result.divergence.descriptor = to_string(cfg.experiment);
  {
    auto out = open_artifact(result.run_dir / "divergence.csv");
    write_divergence_csv(out, result.divergence);
  }

  // Fit over the default window capped where the series stops carrying
  // signal; when distances collapse almost immediately (the grammatically
  // correct swap does this by design), fall back to the usable prefix, and
  // failing that record why no fit exists.
  json fit_payload;
  const FitWindow capped = signal_window(result.divergence);
  FitWindow window = default_fit_window(result.divergence);
  window.t_hi = std::min(window.t_hi, capped.t_hi);
  try {
    result.fit = classify_decay(result.divergence, window);
  } catch (const std::invalid_argument&) {
    try {
      if (capped.t_hi >= 2) {
        result.fit =
            classify_decay(result.divergence, FitWindow{1, capped.t_hi});
      }
    } catch (const std::invalid_argument&) {
    }
  }
  if (result.fit) {
    fit_payload = fit_to_json(*result.fit);
  } else {
    fit_payload = json{
        {"model", nullptr},
        {"reason",
         "fewer than 10 usable samples above the noise floor; the distance "
         "collapsed too quickly to fit a decay law"},
    };
  }
  {
    auto out = open_artifact(result.run_dir / "fit.json");
    out << fit_payload.dump(2) << '\n';
  }

  const json manifest{
      {"run_id", result.run_id},
      {"experiment", to_string(cfg.experiment)},
      {"config", config_to_json(cfg)},
      {"dimensions",
       {{"n", cfg.n},
        {"input_dim",
         static_cast<int>(experiment_input_dim(cfg.experiment))}}},
      {"prng", kRngName},
      {"versions", library_versions()},
      {"artifacts",
       {{"train_trace", "train_trace.csv"},
        {"divergence", "divergence.csv"},
        {"fit", "fit.json"},
        {"recurrent_matrix", "W.txt"},
        {"input_matrix", "w_in.txt"}}},
  };
  {
    auto out = open_artifact(result.run_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  return result;
}

}  // namespace esn
