#include "sl2lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <sstream>

#include "sl2lab/circle.hpp"
#include "sl2lab/holonomy.hpp"
#include "sl2lab/natext.hpp"
#include "sl2lab/obstruction.hpp"
#include "sl2lab/parallel.hpp"
#include "sl2lab/rng.hpp"

namespace sl2lab {

namespace {

constexpr std::uint64_t kSaltRobust = 0x726f6275;      // "robu"
constexpr std::uint64_t kSaltContinuity = 0x636f6e74;  // "cont"
constexpr std::uint64_t kSaltHolonomy = 0x686f6c6f;    // "holo"
constexpr std::uint64_t kSaltNatext = 0x6e617478;      // "natx"

constexpr std::int64_t kDefaultLyapSteps = 10000;
constexpr int kDefaultLyapSamples = 32;
constexpr std::int64_t kDefaultRobustSteps = 10000;
constexpr int kDefaultRobustSamples = 8;
constexpr std::int64_t kDefaultContinuitySteps = 20000;
constexpr int kDefaultContinuitySamples = 16;
constexpr int kDefaultNatextSamples = 1000;
constexpr int kDecayStart = 5;
// Added to the cross-check threshold: exact constant cocycles give zero
// sampling error but still differ by accumulated rounding (~1e-15).
constexpr double kRoundoffFloor = 1e-9;

const CocycleSpec& need_spec(const ExperimentConfig& cfg) {
  if (!cfg.spec) fail(ErrorKind::config, "this command needs a cocycle spec (--spec or \"spec\" in the config file)");
  return *cfg.spec;
}

Json common_echo(const ExperimentConfig& cfg) {
  Json j = {{"k", cfg.k}, {"seed", cfg.seed}, {"workers", cfg.workers}};
  if (cfg.spec) j["spec"] = to_json(*cfg.spec);
  return j;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

template <typename T>
T get_field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::config, std::string("config field '") + key + "': " + e.what());
  }
}

void check_positive(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::config, what);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::domain:
    case ErrorKind::range:
    case ErrorKind::depth:
    case ErrorKind::not_same_unstable_leaf:
      return kExitConfig;
    default:
      return kExitNumeric;
  }
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) fail(ErrorKind::domain, "spearman needs two equal samples of size >= 2");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = 0.5 * (n + 1.0);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

void merge_config(ExperimentConfig& cfg, const Json& j, const std::string& base_dir) {
  if (!j.is_object()) fail(ErrorKind::config, "config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "spec") {
      if (value.is_string()) {
        std::filesystem::path p = value.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        cfg.spec = cocycle_from_json(load_json_file(p.string()));
      } else {
        cfg.spec = cocycle_from_json(value);
      }
    } else if (key == "k") {
      cfg.k = get_field<int>(j, "k");
    } else if (key == "seed") {
      cfg.seed = get_field<std::uint64_t>(j, "seed");
    } else if (key == "workers") {
      cfg.workers = get_field<int>(j, "workers");
    } else if (key == "method") {
      cfg.method = get_field<std::string>(j, "method");
    } else if (key == "steps") {
      cfg.steps = get_field<std::int64_t>(j, "steps");
    } else if (key == "samples") {
      cfg.samples = get_field<int>(j, "samples");
    } else if (key == "direction_steps") {
      cfg.direction_steps = get_field<int>(j, "direction_steps");
    } else if (key == "epsilon") {
      cfg.epsilon = get_field<double>(j, "epsilon");
    } else if (key == "trials") {
      cfg.trials = get_field<int>(j, "trials");
    } else if (key == "js") {
      cfg.js = get_field<std::vector<int>>(j, "js");
    } else if (key == "max_period") {
      cfg.max_period = get_field<int>(j, "max_period");
    } else if (key == "tol") {
      cfg.tol = get_field<double>(j, "tol");
    } else if (key == "max_depth") {
      cfg.max_depth = get_field<int>(j, "max_depth");
    } else if (key == "pairs") {
      cfg.pairs = get_field<int>(j, "pairs");
    } else if (key == "offset") {
      cfg.offset = get_field<double>(j, "offset");
    } else if (key == "grid") {
      cfg.grid = get_field<int>(j, "grid");
    } else if (key == "iterations") {
      cfg.iterations = get_field<int>(j, "iterations");
    } else if (key == "depth") {
      cfg.depth = get_field<int>(j, "depth");
    } else {
      fail(ErrorKind::config, "unknown config field '" + key + "'");
    }
  }
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i].is_string()) {
        out << row[i].get<std::string>();
      } else if (!row[i].is_null()) {
        out << row[i].dump();
      }
    }
    out << '\n';
  }
  return out.str();
}

CommandOutcome cmd_lyap(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  const auto steps = cfg.steps.value_or(kDefaultLyapSteps);
  const int samples = cfg.samples.value_or(kDefaultLyapSamples);
  const bool use_norm = cfg.method == "norm-growth" || cfg.method == "both";
  const bool use_furst = cfg.method == "furstenberg" || cfg.method == "both";
  if (!use_norm && !use_furst) {
    fail(ErrorKind::config, "method must be norm-growth, furstenberg or both, got '" + cfg.method + "'");
  }
  EstimatorOptions opts{cfg.workers, cfg.direction_steps};

  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config.update({{"method", cfg.method}, {"steps", steps}, {"samples", samples},
                     {"direction_steps", cfg.direction_steps}});

  std::optional<LyapunovEstimate> norm, furst;
  if (use_norm) norm = lyapunov_norm_growth(spec, map, steps, samples, cfg.seed, opts);
  if (use_furst) furst = lyapunov_furstenberg(spec, map, steps, samples, cfg.seed, opts);

  Json& r = out.results;
  if (norm) r["norm_growth"] = to_json(*norm, true);
  if (furst) r["furstenberg"] = to_json(*furst, true);
  r["value"] = norm ? norm->value : furst->value;

  if (norm && furst) {
    Json check;
    if (furst->degenerate) {
      // No Oseledets gap: the only consistent norm-growth answer is zero.
      const double threshold = std::max(3.0 * norm->std_error, 1e-6);  // the zero-exponent tolerance
      check = {{"furstenberg_degenerate", true},
               {"delta", std::abs(norm->value)},
               {"threshold", threshold},
               {"pass", std::abs(norm->value) <= threshold}};
    } else {
      const double combined = std::hypot(norm->std_error, furst->std_error);
      const double delta = std::abs(norm->value - furst->value);
      const double threshold = 3.0 * combined + kRoundoffFloor;
      check = {{"furstenberg_degenerate", false},
               {"delta", delta},
               {"combined_std_error", combined},
               {"threshold", threshold},
               {"pass", delta <= threshold}};
    }
    r["cross_check"] = check;
    if (!check["pass"].get<bool>()) out.exit_code = kExitCheck;
  }

  out.table.columns = {"sample", "norm_growth", "furstenberg"};
  for (int i = 0; i < samples; ++i) {
    Json a = norm ? Json(norm->sample_values[i]) : Json();
    Json b = (furst && !furst->degenerate) ? Json(furst->sample_values[i]) : Json();
    out.table.rows.push_back({i, a, b});
  }
  return out;
}

CommandOutcome cmd_robustness(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  check_positive(cfg.epsilon >= 0.0, "epsilon must be >= 0");
  check_positive(cfg.trials >= 1, "trials must be >= 1");
  const auto steps = cfg.steps.value_or(kDefaultRobustSteps);
  const int samples = cfg.samples.value_or(kDefaultRobustSamples);

  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config.update({{"epsilon", cfg.epsilon}, {"trials", cfg.trials}, {"steps", steps}, {"samples", samples}});

  // Every estimate reuses the same orbit seed, so trial-to-trial differences
  // come from the perturbation rather than from sampling noise.
  const auto base = lyapunov_norm_growth(spec, map, steps, samples, cfg.seed, {cfg.workers});
  struct Trial {
    std::uint64_t perturbation_seed = 0;
    double distance = 0.0;
    LyapunovEstimate est;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
  parallel_for(trials.size(), cfg.workers, [&](std::size_t t) {
    Trial& tr = trials[t];
    tr.perturbation_seed = derive_seed(cfg.seed, t, kSaltRobust);
    const CocycleSpec perturbed = perturb(spec, cfg.epsilon, tr.perturbation_seed);
    tr.distance = sup_distance(spec, perturbed).upper_bound;
    tr.est = lyapunov_norm_growth(perturbed, map, steps, samples, cfg.seed);
  });

  const double threshold = 0.5 * base.value;
  std::vector<double> values;
  Json rows = Json::array();
  out.table.columns = {"trial", "perturbation_seed", "c0_distance", "value", "std_error"};
  int below = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Trial& tr = trials[t];
    values.push_back(tr.est.value);
    if (tr.est.value < threshold) ++below;
    rows.push_back({{"trial", t},
                    {"perturbation_seed", tr.perturbation_seed},
                    {"c0_distance", tr.distance},
                    {"value", tr.est.value},
                    {"std_error", tr.est.std_error}});
    out.table.rows.push_back({t, tr.perturbation_seed, tr.distance, tr.est.value, tr.est.std_error});
  }
  out.results = {{"baseline", to_json(base)},
                 {"threshold", threshold},
                 {"min", *std::min_element(values.begin(), values.end())},
                 {"median", median(values)},
                 {"max", *std::max_element(values.begin(), values.end())},
                 {"fraction_below_threshold", static_cast<double>(below) / cfg.trials},
                 {"all_above_threshold", below == 0},
                 {"trials", rows}};
  return out;
}

CommandOutcome cmd_continuity(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  if (cfg.js.size() < 2) fail(ErrorKind::config, "continuity needs at least two values of j");
  for (int j : cfg.js) check_positive(j >= 1, "continuity j values must be >= 1");
  const auto steps = cfg.steps.value_or(kDefaultContinuitySteps);
  const int samples = cfg.samples.value_or(kDefaultContinuitySamples);
  const std::uint64_t twist_seed = derive_seed(cfg.seed, 0, kSaltContinuity);
  const auto g = random_unit_twist(twist_seed);

  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config.update({{"sequence_rule", "A_j = A R(2 pi g / j), g a random unit trig polynomial"},
                     {"twist_seed", twist_seed},
                     {"js", cfg.js},
                     {"steps", steps},
                     {"samples", samples}});

  const auto base = lyapunov_norm_growth(spec, map, steps, samples, cfg.seed, {cfg.workers});
  struct Row {
    double distance = 0.0;
    LyapunovEstimate est;
  };
  std::vector<Row> rows(cfg.js.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    const CocycleSpec aj = add_twist(spec, g, 1.0 / cfg.js[i]);
    rows[i].distance = sup_distance(spec, aj).upper_bound;
    rows[i].est = lyapunov_norm_growth(aj, map, steps, samples, cfg.seed);
  });

  Json table = Json::array();
  std::vector<double> distances, deltas;
  double max_delta_large_j = 0.0;
  out.table.columns = {"j", "c0_distance", "value", "std_error", "delta"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double delta = std::abs(rows[i].est.value - base.value);
    distances.push_back(rows[i].distance);
    deltas.push_back(delta);
    if (cfg.js[i] >= 100) max_delta_large_j = std::max(max_delta_large_j, delta);
    table.push_back({{"j", cfg.js[i]},
                     {"c0_distance", rows[i].distance},
                     {"value", rows[i].est.value},
                     {"std_error", rows[i].est.std_error},
                     {"delta", delta}});
    out.table.rows.push_back({cfg.js[i], rows[i].distance, rows[i].est.value, rows[i].est.std_error, delta});
  }
  table.push_back({{"j", "inf"},
                   {"c0_distance", 0.0},
                   {"value", base.value},
                   {"std_error", base.std_error},
                   {"delta", 0.0}});
  out.table.rows.push_back({"inf", 0.0, base.value, base.std_error, 0.0});

  const double rho = spearman(distances, deltas);
  out.results = {{"baseline", to_json(base)},
                 {"rows", table},
                 {"trend", {{"spearman", rho},
                            {"positive_trend", rho > 0.0},
                            {"max_delta_j_ge_100", max_delta_large_j}}}};
  return out;
}

CommandOutcome cmd_scan_periodic(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  check_positive(cfg.max_period >= 1, "max_period must be >= 1");

  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config["max_period"] = cfg.max_period;

  const auto orbits = periodic_orbits(map, cfg.max_period);
  Json list = Json::array();
  Json witness = nullptr;
  int n_hyperbolic = 0;
  out.table.columns = {"numerator", "denominator", "period", "x", "trace", "hyperbolic"};
  for (const auto& p : orbits) {
    // A^per(p) = A(f^{per-1} p) ... A(p), every orbit point taken from its exact numerator.
    Mat2 prod = Mat2::identity();
    for (int j = 0; j < p.period; ++j) {
      const double xj = static_cast<double>(p.orbit_numerator(cfg.k, j)) / static_cast<double>(p.denominator);
      prod = spec.evaluate(xj) * prod;
    }
    const double trace = prod.trace();
    const bool hyp = is_hyperbolic(prod);
    Json entry = {{"numerator", p.numerator},
                  {"denominator", p.denominator},
                  {"period", p.period},
                  {"x", p.x()},
                  {"trace", trace},
                  {"hyperbolic", hyp}};
    if (hyp) {
      ++n_hyperbolic;
      if (witness.is_null()) witness = entry;
    }
    out.table.rows.push_back({p.numerator, p.denominator, p.period, p.x(), trace, hyp});
    list.push_back(std::move(entry));
  }
  out.results = {{"n_orbits", orbits.size()}, {"n_hyperbolic", n_hyperbolic}, {"witness", witness}, {"orbits", list}};
  return out;
}

CommandOutcome cmd_holonomy(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  check_positive(cfg.pairs >= 1, "pairs must be >= 1");
  check_positive(cfg.tol > 0.0, "tol must be positive");
  check_positive(cfg.max_depth > kDecayStart, "max_depth must exceed 5");
  const double offset = cfg.offset.value_or(map.rho() / (2.0 * cfg.k));
  // The forward-shifted pair sits k times further apart and must stay local.
  check_positive(offset > 0.0 && offset < map.rho() / cfg.k, "offset must lie in (0, rho/k)");

  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config.update({{"pairs", cfg.pairs}, {"tol", cfg.tol}, {"max_depth", cfg.max_depth}, {"offset", offset}});

  const BunchingResult bunching = u_bunching_check(spec, map, spec.theta());

  struct Pair {
    double offset = 0.0;
    bool self_identity = false;
    HolonomyResult h;
    double composition = 0.0;
    std::optional<double> equivariance;
    std::optional<double> decay_rate;
  };
  std::vector<Pair> pairs(static_cast<std::size_t>(cfg.pairs));
  parallel_for(pairs.size(), cfg.workers, [&](std::size_t i) {
    Pair& p = pairs[i];
    Rng rng(cfg.seed, i, kSaltHolonomy);
    const auto x = random_itinerary(cfg.k, cfg.max_depth + 1, rng);
    p.offset = offset * (2.0 * rng.uniform() - 1.0);
    if (p.offset == 0.0) p.offset = offset;
    const double second = offset * (2.0 * rng.uniform() - 1.0);
    const auto y = sample_unstable_neighbor(x, p.offset);
    const auto z = sample_unstable_neighbor(x, second);

    const auto self = u_holonomy(spec, map, x, x, cfg.tol, cfg.max_depth);
    p.self_identity = self.h == Matrix2::identity();
    p.h = u_holonomy(spec, map, x, y, cfg.tol, cfg.max_depth);
    const auto hyz = u_holonomy(spec, map, y, z, cfg.tol, cfg.max_depth);
    const auto hxz = u_holonomy(spec, map, x, z, cfg.tol, cfg.max_depth);
    p.composition = op_norm(hyz.h * p.h.h - hxz.h);
    if (bunching.bunched && p.h.converged) {
      try {
        p.equivariance = holonomy_equivariance_residual(spec, map, x, y, cfg.tol, cfg.max_depth);
      } catch (const LabError& e) {
        if (e.kind() != ErrorKind::convergence) throw;
      }
    }
    const auto& tr = p.h.residual_trace;
    const int last = static_cast<int>(tr.size());
    if (last > kDecayStart && tr[kDecayStart - 1] > 0.0 && tr[last - 1] > 0.0) {
      p.decay_rate = std::pow(tr[last - 1] / tr[kDecayStart - 1], 1.0 / (last - kDecayStart));
    }
  });

  Json list = Json::array();
  int n_converged = 0;
  bool all_identity = true;
  double max_composition = 0.0, max_equivariance = 0.0, max_decay = 0.0;
  int n_equivariance = 0, n_decay = 0;
  out.table.columns = {"pair", "offset", "depth_used", "cauchy_residual", "converged", "composition_residual",
                       "equivariance_residual", "decay_rate"};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Pair& p = pairs[i];
    all_identity = all_identity && p.self_identity;
    if (p.h.converged) ++n_converged;
    max_composition = std::max(max_composition, p.composition);
    if (p.equivariance) {
      ++n_equivariance;
      max_equivariance = std::max(max_equivariance, *p.equivariance);
    }
    if (p.decay_rate) {
      ++n_decay;
      max_decay = std::max(max_decay, *p.decay_rate);
    }
    const Json eq = p.equivariance ? Json(*p.equivariance) : Json();
    const Json dr = p.decay_rate ? Json(*p.decay_rate) : Json();
    list.push_back({{"pair", i},
                    {"offset", p.offset},
                    {"holonomy", to_json(p.h)},
                    {"composition_residual", p.composition},
                    {"equivariance_residual", eq},
                    {"decay_rate", dr}});
    out.table.rows.push_back(
        {i, p.offset, p.h.depth_used, p.h.cauchy_residual, p.h.converged, p.composition, eq, dr});
  }
  out.results = {{"bunching", to_json(bunching)},
                 {"self_holonomy_identity", all_identity},
                 {"n_pairs", cfg.pairs},
                 {"n_converged", n_converged},
                 {"max_composition_residual", max_composition},
                 {"n_equivariance", n_equivariance},
                 {"max_equivariance_residual", n_equivariance ? Json(max_equivariance) : Json()},
                 {"max_decay_rate", n_decay ? Json(max_decay) : Json()},
                 {"pairs", list}};
  if (n_converged < cfg.pairs) out.exit_code = kExitNumeric;
  return out;
}

CommandOutcome cmd_bunching(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  CommandOutcome out;
  out.config = common_echo(cfg);
  out.results = to_json(u_bunching_check(spec, map, spec.theta()));
  out.results["k"] = cfg.k;
  out.table.columns = {"k", "bunched", "margin", "grid_max", "grid_error"};
  out.table.rows.push_back({cfg.k, out.results["bunched"], out.results["margin"], out.results["grid_max"],
                            out.results["grid_error"]});
  return out;
}

CommandOutcome cmd_degree(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config["grid"] = cfg.grid;
  out.results = to_json(degree_obstruction(cfg.k, twist_degree(spec, cfg.grid)));
  out.table.columns = {"k", "twist_degree", "single_section_solvable", "pair_section_solvable", "obstructed"};
  out.table.rows.push_back({cfg.k, out.results["twist_degree"], out.results["single_section_solvable"],
                            out.results["pair_section_solvable"], out.results["obstructed"]});
  return out;
}

CommandOutcome cmd_section(const ExperimentConfig& cfg) {
  const CocycleSpec& spec = need_spec(cfg);
  const ExpandingMap map(cfg.k);
  CommandOutcome out;
  out.config = common_echo(cfg);
  out.config.update({{"grid", cfg.grid}, {"iterations", cfg.iterations}, {"direction_steps", cfg.direction_steps}});
  const auto s = section_consistency_search(spec, map, cfg.grid, cfg.iterations, cfg.seed, cfg.direction_steps);
  out.results = {{"residual", s.residual},
                 {"final_residual", s.final_residual},
                 {"residual_trace", s.residual_trace},
                 {"seeded_from_oseledets", s.seeded_from_oseledets},
                 {"degree", to_json(degree_obstruction(cfg.k, twist_degree(spec, cfg.grid)))}};
  out.table.columns = {"iteration", "residual"};
  for (std::size_t i = 0; i < s.residual_trace.size(); ++i) out.table.rows.push_back({i, s.residual_trace[i]});
  return out;
}

CommandOutcome cmd_natext(const ExperimentConfig& cfg) {
  const ExpandingMap map(cfg.k);
  const int samples = cfg.samples.value_or(kDefaultNatextSamples);
  check_positive(samples >= 1, "samples must be >= 1");
  check_positive(cfg.depth >= 1, "depth must be >= 1");

  CommandOutcome out;
  out.config = {{"k", cfg.k}, {"seed", cfg.seed}, {"workers", cfg.workers}, {"samples", samples}, {"depth", cfg.depth}};

  const NatExtRealization real = build_realization(map);
  const HighPrecision lambda = real.lambda;
  const HighPrecision bound = pow(lambda, cfg.depth);
  // Lower bound on |iota(x^) - iota(y^)| when the itineraries first differ at
  // level m: the level-m bumps differ by at least delta, deeper levels by at
  // most 2 each.
  const HighPrecision sep_factor =
      (HighPrecision(real.delta) - 2 * lambda / (1 - lambda)) / (2 * real.n_charts);

  struct Sample {
    double residual = 0.0;
    double ratio = 0.0;
    int level = 0;
  };
  std::vector<Sample> rows(static_cast<std::size_t>(samples));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    Rng rng(cfg.seed, i, kSaltNatext);
    const auto it = random_itinerary(cfg.k, cfg.depth + 1, rng);
    rows[i].residual = conjugacy_residual(real, it, cfg.depth);

    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.depth)));
    std::vector<int> digits = it.digits();
    digits[m - 1] = (digits[m - 1] + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.k - 1)))) % cfg.k;
    const BackwardItinerary other(cfg.k, it.anchor(), std::move(digits));
    const auto a = exact_backward_orbit(it);
    const auto b = exact_backward_orbit(other);
    const HighPrecision dist = natext_distance(iota_exact(real, a, cfg.depth), iota_exact(real, b, cfg.depth));
    rows[i].ratio = static_cast<double>(dist / (pow(lambda, m - 1) * sep_factor));
    rows[i].level = m;
  });

  double max_residual = 0.0, min_ratio = INFINITY;
  int collisions = 0;
  std::vector<double> residuals;
  out.table.columns = {"sample", "conjugacy_residual", "separation_level", "separation_ratio"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    max_residual = std::max(max_residual, rows[i].residual);
    min_ratio = std::min(min_ratio, rows[i].ratio);
    if (!(rows[i].ratio >= 1.0)) ++collisions;
    out.table.rows.push_back({i, rows[i].residual, rows[i].level, rows[i].ratio});
  }
  const double bound_d = static_cast<double>(bound);
  const bool lambda_ok = real.lambda < real.delta / (4.0 * real.n_charts);
  const bool conj_ok = max_residual <= bound_d;
  out.results = {{"realization", to_json(real)},
                 {"delta_certified", real.delta > 0.0},
                 {"lambda_below_bound", lambda_ok},
                 {"conjugacy", {{"max_residual", max_residual}, {"bound", bound_d}, {"pass", conj_ok}}},
                 {"injectivity", {{"pairs", samples}, {"collisions", collisions}, {"min_separation_ratio", min_ratio}}}};
  if (!(real.delta > 0.0 && lambda_ok && conj_ok && collisions == 0)) out.exit_code = kExitCheck;
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"lyap",     "robustness", "continuity", "scan-periodic", "holonomy",
                                              "bunching", "degree",     "section",    "natext"};
  return names;
}

CommandOutcome run_command(const std::string& name, const ExperimentConfig& cfg) {
  check_positive(cfg.workers >= 1, "workers must be >= 1");
  if (name == "lyap") return cmd_lyap(cfg);
  if (name == "robustness") return cmd_robustness(cfg);
  if (name == "continuity") return cmd_continuity(cfg);
  if (name == "scan-periodic") return cmd_scan_periodic(cfg);
  if (name == "holonomy") return cmd_holonomy(cfg);
  if (name == "bunching") return cmd_bunching(cfg);
  if (name == "degree") return cmd_degree(cfg);
  if (name == "section") return cmd_section(cfg);
  if (name == "natext") return cmd_natext(cfg);
  fail(ErrorKind::config, "unknown command '" + name + "'");
}

Json make_report(const std::string& command, const CommandOutcome& outcome, const Json& timestamps) {
  Json j = {{"command", command}, {"config", outcome.config}, {"results", outcome.results}, {"version", SL2LAB_VERSION}};
  if (!timestamps.is_null()) j["timestamps"] = timestamps;
  return j;
}

}  // namespace sl2lab
