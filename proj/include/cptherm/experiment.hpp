#pragma once

// Batch experiments: JSON configuration, task dispatch, checks against
// oracles, and the comma-separated / JSON outputs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpt {

enum class Task {
  kPressure,
  kCapacity,
  kSpectrum,
  kCorrelation,
  kVpCheck,
  kInverseVp,
  kGapExample,
  kTransferCheck,
  kPropertySuite,
};

/// Accepts both the config spelling (vp_check) and the subcommand spelling
/// (vp-check); "suite" is an alias of property_suite.
Task parse_task(const std::string& name);
std::string to_string(Task task);

struct SystemConfig {
  enum class Kind { kFullShift, kSft, kLineDoubling };
  Kind kind = Kind::kFullShift;
  int k = 2;
  std::vector<std::vector<int>> matrix;
  bool two_sided = false;
};

struct PotentialConfig {
  std::string name;  ///< empty for tables; else zero | constant | arccot | quadratic | sine | scaled_sine
  double value = 0.0;
  int depth = 1;
  std::vector<double> table;
};

struct SubsetConfig {
  enum class Kind { kWhole, kSubShift, kCylinders, kOrigin };
  Kind kind = Kind::kWhole;
  std::vector<std::vector<int>> matrix;
  std::vector<std::vector<int>> words;
  int start = 0;
};

struct BudgetConfig {
  std::vector<int> depths;  ///< empty: the potential depth
  int n_max = 24;
  double tol = 1e-6;
  int cap_offset = 8;
  std::vector<double> q;  ///< empty: [-5, 5] step 0.05
  int n = 0;  ///< correlation / inverse-vp word length; 0: task default (20 / 14)
  int samples = 200;
  int arcs = 64;
  double capacity_tol = 1e-3;
  double correlation_tol = 1e-3;
  double vp_slack = 0.05;
  std::vector<double> measure;  ///< Bernoulli weights for inverse-vp; empty: equilibrium state
};

struct ExperimentConfig {
  SystemConfig system;
  PotentialConfig potential;
  SubsetConfig subset;
  std::optional<Task> task;
  BudgetConfig budget;
  std::string output;
  std::uint64_t seed = 20240601;
};

/// Throws Error(kConfigError) naming the offending field path.
ExperimentConfig parse_config(const std::string& json_text);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  std::string oracle;  ///< what `reference` is, or "estimate-only"
  bool pass = false;
};

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct TaskReport {
  std::string task;
  std::vector<CheckResult> checks;
  std::vector<Table> tables;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;  ///< reported on the console only

  bool pass() const;
};

struct RunReport {
  std::vector<TaskReport> tasks;
  std::uint64_t seed = 0;

  bool all_pass() const;
};

/// Runs the configured task (or the full property suite). `jobs` bounds the
/// worker pool used for independent sub-tasks; results do not depend on it.
RunReport run(const ExperimentConfig& config, int jobs = 1);

/// Writes every table of the report plus summary.json into `dir`. Tables of
/// the same file name are concatenated under one header.
void emit_tables(const RunReport& report, const std::string& dir);

std::string summary_json(const RunReport& report);

}  // namespace cpt
