#pragma once

#include "esn/divergence.hpp"
#include "esn/sequences.hpp"
#include "esn/trainer.hpp"
#include "esn/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace esn {

/// The four reproducible experiments. All train an anticipating reservoir
/// and then measure twin-network divergence after a controlled input
/// difference: one flipped sign (reduced), one grammar violation, one
/// grammatically correct block swap, or a violation followed by permanently
/// wrong grammar for both twins.
enum class ExperimentKind {
  Reduced,
  GrammarViolation,
  GrammarSwap,
  GrammarPermanent,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Full description of one run. Defaults depend on the experiment kind and
/// reproduce the reference experiments with zero extra settings.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Reduced;
  int n = 8;
  ConstraintMode constraint = ConstraintMode::Orthogonal;
  double learning_rate = 0.01;
  int iterations = 5000;
  double s_start = 1.0;
  double s_end = 1.0;
  int ramp_iterations = 0;
  int transient = 1000;
  Eigen::Index horizon = 10000;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "runs";

  TrainConfig train_config() const;
};

/// Built-in protocol defaults for each experiment kind.
ExperimentConfig default_config(ExperimentKind kind);

/// 1 for the reduced model, 2 for the grammar experiments.
Eigen::Index experiment_input_dim(ExperimentKind kind);

/// Applies defaults and validates; throws ConfigError naming the offending
/// field. Unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Reads and parses a config file; parse errors carry line/column.
ExperimentConfig validate_config(const std::filesystem::path& path);

/// Semantic cross-checks on an assembled config (same rules as
/// config_from_json); throws ConfigError naming the field.
void validate_semantics(const ExperimentConfig& cfg);

/// Canonical echo of the run-defining fields. The output directory is
/// excluded so identical experiments produce byte-identical artifacts
/// regardless of where they are written.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Deterministic 16-hex-digit identifier of the canonical config echo.
std::string run_identifier(const ExperimentConfig& cfg);

/// Trains a fresh reservoir for the configured experiment (initialization,
/// training input and the run itself all derive from cfg.seed).
TrainTrace train_experiment(const ExperimentConfig& cfg);

/// Warmup plus the two twin input streams for the configured perturbation.
struct TwinInputs {
  InputSequence warmup;
  InputSequence a;
  InputSequence b;
};
TwinInputs build_twin_inputs(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::filesystem::path run_dir;
  std::string run_id;
  TrainTrace trace;
  DivergenceSeries divergence;
  std::optional<DecayFit> fit;  // absent when distances collapse too fast
};

/// Full pipeline: train, run the matching twin experiment, and write
/// train_trace.csv, divergence.csv, fit.json, W.txt, w_in.txt and
/// manifest.json into <out_dir>/<experiment>-<run_id>/.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace esn
