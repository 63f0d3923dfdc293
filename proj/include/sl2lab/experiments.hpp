#pragma once

// Experiment drivers behind the sl2lab command line. Each command takes the
// resolved configuration and returns the config echo, the results payload,
// an optional CSV table and the process exit code. Results never depend on
// the worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sl2lab/cocycle.hpp"
#include "sl2lab/errors.hpp"
#include "sl2lab/serialization.hpp"

namespace sl2lab {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitCheck = 3;

int exit_code_for(ErrorKind kind);

struct ExperimentConfig {
  std::optional<CocycleSpec> spec;
  int k = 8;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;

  std::string method = "both";  // lyap: norm-growth | furstenberg | both
  std::optional<std::int64_t> steps;
  std::optional<int> samples;
  int direction_steps = 100;

  double epsilon = 0.05;
  int trials = 200;
  std::vector<int> js{10, 30, 100, 300};

  int max_period = 4;

  double tol = 1e-8;
  int max_depth = 60;
  int pairs = 100;
  std::optional<double> offset;  // default rho/(2k)

  int grid = kCertificationGrid;
  int iterations = 4;
  int depth = 20;
};

/// Applies the keys of a config file on top of `cfg`. A "spec" key may hold an
/// inline cocycle or a path resolved against `base_dir`.
void merge_config(ExperimentConfig& cfg, const Json& j, const std::string& base_dir);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

std::string to_csv(const CsvTable& table);

struct CommandOutcome {
  Json config;
  Json results;
  CsvTable table;
  int exit_code = kExitOk;
};

CommandOutcome cmd_lyap(const ExperimentConfig& cfg);
CommandOutcome cmd_robustness(const ExperimentConfig& cfg);
CommandOutcome cmd_continuity(const ExperimentConfig& cfg);
CommandOutcome cmd_scan_periodic(const ExperimentConfig& cfg);
CommandOutcome cmd_holonomy(const ExperimentConfig& cfg);
CommandOutcome cmd_bunching(const ExperimentConfig& cfg);
CommandOutcome cmd_degree(const ExperimentConfig& cfg);
CommandOutcome cmd_section(const ExperimentConfig& cfg);
CommandOutcome cmd_natext(const ExperimentConfig& cfg);

/// Dispatches on the subcommand name; throws a config error for unknown names.
CommandOutcome run_command(const std::string& name, const ExperimentConfig& cfg);
const std::vector<std::string>& command_names();

/// {command, config, results, version} plus timestamps when given.
Json make_report(const std::string& command, const CommandOutcome& outcome, const Json& timestamps = nullptr);

/// Spearman rank correlation with average ranks for ties; NaN when either
/// side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sl2lab
