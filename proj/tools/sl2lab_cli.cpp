// sl2lab: experiment driver. Writes a JSON report to stdout (or --out) and
// optionally the command's table as CSV.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "sl2lab/experiments.hpp"

namespace {

struct Flags {
  std::string spec, config, method, csv, out;
  std::optional<int> k, workers, samples, trials, max_period, max_depth, grid, pairs, iterations, depth,
      direction_steps;
  std::optional<std::int64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon, tol, offset;
  std::vector<int> js;
  bool no_timestamps = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--spec", f.spec, "Cocycle spec JSON file");
  app->add_option("--config", f.config, "Config JSON file; flags override its keys");
  app->add_option("--k", f.k, "Degree of the base map x -> kx mod 1");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--steps", f.steps, "Orbit length per sample");
  app->add_option("--samples", f.samples, "Independent samples");
  app->add_option("--direction-steps", f.direction_steps, "Forward steps per stable-direction estimate");
  app->add_option("--method", f.method, "lyap estimator: norm-growth, furstenberg or both");
  app->add_option("--epsilon", f.epsilon, "Perturbation size (turns)");
  app->add_option("--trials", f.trials, "Perturbation trials");
  app->add_option("--js", f.js, "Continuity sequence indices");
  app->add_option("--max-period", f.max_period, "Largest period to scan");
  app->add_option("--tol", f.tol, "Holonomy Cauchy tolerance");
  app->add_option("--max-depth", f.max_depth, "Holonomy depth limit");
  app->add_option("--pairs", f.pairs, "Random unstable pairs");
  app->add_option("--offset", f.offset, "Largest anchor offset of a holonomy pair");
  app->add_option("--grid", f.grid, "Grid size for degree and section");
  app->add_option("--iterations", f.iterations, "Section search iterations");
  app->add_option("--depth", f.depth, "Realization depth");
  app->add_option("--workers", f.workers, "Worker threads (results do not depend on it)");
  app->add_option("--csv", f.csv, "Write the command's table as CSV");
  app->add_option("--out", f.out, "Write the report here instead of stdout");
  app->add_flag("--no-timestamps", f.no_timestamps, "Omit wall-clock timestamps from the report");
}

template <typename T>
void override_with(T& target, const std::optional<T>& v) {
  if (v) target = *v;
}

sl2lab::ExperimentConfig resolve(const Flags& f) {
  sl2lab::ExperimentConfig cfg;
  if (!f.config.empty()) {
    const auto dir = std::filesystem::path(f.config).parent_path().string();
    sl2lab::merge_config(cfg, sl2lab::load_json_file(f.config), dir);
  }
  if (!f.spec.empty()) cfg.spec = sl2lab::cocycle_from_json(sl2lab::load_json_file(f.spec));
  override_with(cfg.k, f.k);
  override_with(cfg.seed, f.seed);
  override_with(cfg.workers, f.workers);
  if (!f.method.empty()) cfg.method = f.method;
  if (f.steps) cfg.steps = f.steps;
  if (f.samples) cfg.samples = f.samples;
  override_with(cfg.direction_steps, f.direction_steps);
  override_with(cfg.epsilon, f.epsilon);
  override_with(cfg.trials, f.trials);
  if (!f.js.empty()) cfg.js = f.js;
  override_with(cfg.max_period, f.max_period);
  override_with(cfg.tol, f.tol);
  override_with(cfg.max_depth, f.max_depth);
  override_with(cfg.pairs, f.pairs);
  if (f.offset) cfg.offset = f.offset;
  override_with(cfg.grid, f.grid);
  override_with(cfg.iterations, f.iterations);
  override_with(cfg.depth, f.depth);
  return cfg;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) sl2lab::fail(sl2lab::ErrorKind::config, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov exponents of SL(2,R) cocycles over expanding circle maps"};
  app.set_version_flag("--version", SL2LAB_VERSION);
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> blurbs{
      {"lyap", "top Lyapunov exponent, norm growth and Furstenberg estimators with a cross-check"},
      {"robustness", "exponent under random C0-small twist perturbations"},
      {"continuity", "exponent along a perturbation sequence converging to the cocycle"},
      {"scan-periodic", "traces of the cocycle over periodic orbits"},
      {"holonomy", "unstable holonomies: convergence, composition, equivariance"},
      {"bunching", "u-bunching margin on a certified grid"},
      {"degree", "twist degree and the section obstruction"},
      {"section", "numerical search for an invariant projective section"},
      {"natext", "natural-extension realization checks in 50-digit arithmetic"},
  };
  for (const auto& name : sl2lab::command_names()) add_flags(app.add_subcommand(name, blurbs.at(name)), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sl2lab::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = resolve(flags);
    const std::string started = utc_now();
    const auto outcome = sl2lab::run_command(command, cfg);
    nlohmann::json stamps = nullptr;
    if (!flags.no_timestamps) stamps = {{"started", started}, {"finished", utc_now()}};
    const std::string text = sl2lab::make_report(command, outcome, stamps).dump(2) + "\n";
    if (flags.out.empty()) {
      std::cout << text;
    } else {
      write_file(flags.out, text);
    }
    if (!flags.csv.empty()) write_file(flags.csv, sl2lab::to_csv(outcome.table));
    if (outcome.exit_code != sl2lab::kExitOk) {
      std::cerr << "sl2lab " << command << ": check failed (exit " << outcome.exit_code << ")\n";
    }
    return outcome.exit_code;
  } catch (const sl2lab::LabError& e) {
    std::cerr << "sl2lab " << command << ": " << sl2lab::to_string(e.kind()) << " error: " << e.what() << "\n";
    return sl2lab::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "sl2lab " << command << ": " << e.what() << "\n";
    return sl2lab::kExitNumeric;
  }
}
