#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "retro/attacks.hpp"
#include "retro/axioms.hpp"
#include "retro/rule_spec.hpp"
#include "retro/votegen.hpp"

namespace retro {

enum class ExperimentKind { bribery, control, robustness, vev, welfare_gini_alignment, axioms };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);  // throws ConfigError

inline constexpr const char* kArtifactVersion = "0.1.0";

/// One run of an experiment family over rules x sweep values x trials.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bribery;
  std::vector<RuleSpec> rules;
  GenSpec generation;                         // used unless `input` is set
  std::optional<std::filesystem::path> input;  // ballot CSV shared by all trials
  // Target increase (bribery, control), concentration (vev) or axiom index
  // (axioms). Ignored by robustness and welfare_gini_alignment.
  std::vector<double> sweep;
  ControlMode control_mode = ControlMode::remove;
  std::size_t trials = 100;
  std::size_t perturbations = 20;  // robustness samples per trial
  std::uint64_t seed = 0;
  std::filesystem::path output = "experiment";  // writes <output>.trials.csv and <output>.summary.json
  std::size_t workers = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// A trial row. `metrics` follow the experiment's metric_names() order;
/// a failed cell carries the error name and leaves metrics empty.
struct TrialRecord {
  std::string rule;  // RuleSpec label
  double sweep = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> metrics;
  std::string error;
};

struct MetricSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
};

struct CellSummary {
  std::string rule;
  double sweep = 0.0;
  std::size_t errors = 0;
  std::vector<MetricSummary> metrics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> metric_names;
  std::vector<TrialRecord> records;  // canonical order: rule, sweep, trial
  std::vector<CellSummary> cells;
  std::size_t resumed = 0;           // rows taken from an earlier partial run
};

std::vector<std::string> metric_names(ExperimentKind kind);

/// Mean, population stddev, min and max of the successful rows, summed in
/// trial order so the numbers recompute exactly from the CSV.
std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records, std::size_t metrics);

/// Seed of trial t: every rule and sweep value of that trial sees the same
/// election, which pairs the comparisons.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// Runs one cell. Module errors are caught and recorded on the row.
TrialRecord run_trial(const ExperimentConfig& config, const RuleSpec& rule, double sweep,
                      std::size_t trial);

/// Runs every cell not already present in <output>.trials.csv, then writes
/// the full trial CSV and the summary JSON.
ExperimentReport run_experiment(const ExperimentConfig& config);

void write_trials_csv(std::ostream& out, const ExperimentReport& report);
std::vector<TrialRecord> read_trials_csv(std::istream& in, std::size_t metrics);
nlohmann::json summary_json(const ExperimentReport& report);

/// Self-contained record of a counterexample: rule, profiles as rows and the
/// numbers that show the violation.
nlohmann::json witness_json(const AxiomVerdict& verdict);

}  // namespace retro
