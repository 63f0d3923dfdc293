// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sl2lab/experiments.hpp"
#include "sl2lab/obstruction.hpp"

using namespace sl2lab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CocycleSpec kExample = CocycleSpec::full_twist(Mat2::diag(2.0));
const CocycleSpec kDiag = CocycleSpec::constant(Mat2::diag(2.0));
const CocycleSpec kIdentity = CocycleSpec::constant(Mat2::identity());
const CocycleSpec kRotation = CocycleSpec::constant(Mat2::rotation_turns(0.2));

ExperimentConfig config_for(const CocycleSpec& spec, int k) {
  ExperimentConfig cfg;
  cfg.spec = spec;
  cfg.k = k;
  return cfg;
}

Verdict constant_exactness() {
  auto cfg = config_for(kDiag, 8);
  cfg.steps = 10000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = cmd_lyap(cfg);
  const double dt = seconds_since(t0);
  const double value = out.results["value"];
  const double err = std::abs(value - std::log(2.0));
  return {err <= 1e-4 && dt < 1.0 && out.exit_code == kExitOk,
          fmt("value=%.9f |err|=%.2e runtime=%.3fs", value, err, dt)};
}

Verdict zero_exponent() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, spec, k] : {std::tuple{"identity", kIdentity, 8}, std::tuple{"rotation", kRotation, 2}}) {
    const auto out = cmd_lyap(config_for(spec, k));
    const double v = out.results["value"];
    const bool degenerate = out.results["furstenberg"]["degenerate"];
    ok = ok && std::abs(v) <= 1e-6 && degenerate && out.exit_code == kExitOk;
    detail += fmt("%s: value=%.2e furstenberg_degenerate=%s; ", name, v, degenerate ? "yes" : "no");
  }
  return {ok, detail};
}

Verdict cross_estimator() {
  auto cfg = config_for(kExample, 8);
  cfg.steps = 100000;
  cfg.samples = 32;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = cmd_lyap(cfg);
  const double dt = seconds_since(t0);
  const double a = out.results["norm_growth"]["value"];
  const double b = out.results["furstenberg"]["value"];
  const double combined = std::hypot(out.results["norm_growth"]["std_error"].get<double>(),
                                     out.results["furstenberg"]["std_error"].get<double>());
  const double delta = std::abs(a - b);
  return {delta <= 3 * combined && dt < 30.0,
          fmt("norm=%.6f furst=%.6f |delta|=%.2e 3*se=%.2e runtime=%.2fs", a, b, delta, 3 * combined, dt)};
}

Verdict bunching_threshold() {
  const auto b8 = u_bunching_check(kExample, ExpandingMap(8), 1.0);
  const auto b2 = u_bunching_check(kExample, ExpandingMap(2), 1.0);
  const bool ok = b8.bunched && std::abs(b8.margin - 0.5) <= b8.grid_error + 1e-12 && !b2.bunched;
  return {ok, fmt("k=8 bunched=%d margin=%.6f (grid error %.1e); k=2 bunched=%d max=%.6f", b8.bunched, b8.margin,
                  b8.grid_error, b2.bunched, b2.grid_max)};
}

Verdict holonomy_suite() {
  auto cfg = config_for(kExample, 8);
  cfg.pairs = 100;
  cfg.tol = 1e-8;
  cfg.max_depth = 60;
  const auto out = cmd_holonomy(cfg);
  const auto& r = out.results;
  const double tol = cfg.tol;
  const bool identity = r["self_holonomy_identity"];
  const int converged = r["n_converged"];
  const int n_eq = r["n_equivariance"];
  const double comp = r["max_composition_residual"];
  const double eq = r["max_equivariance_residual"].is_null() ? INFINITY : r["max_equivariance_residual"].get<double>();
  const double rate = r["max_decay_rate"].is_null() ? INFINITY : r["max_decay_rate"].get<double>();
  const bool ok = identity && converged == 100 && n_eq == 100 && comp <= 10 * tol && eq <= 10 * tol && rate <= 0.6;
  return {ok, fmt("identity=%d converged=%d/100 composition=%.2e equivariance=%.2e worst decay/depth=%.3f", identity,
                  converged, comp, eq, rate)};
}

Verdict degree_suite() {
  bool winding_ok = true;
  for (const Vec2 v : {Vec2{1, 0}, Vec2{0, 1}, Vec2{0.6, -0.8}, Vec2{3, 1}}) {
    const auto loop =
        ProjectiveLoop::sample(1024, [&](double x) { return ProjPoint::from_vector(Mat2::rotation_turns(x) * v); });
    winding_ok = winding_ok && winding_number(loop) == 2;
  }
  const auto k4 = degree_obstruction(4, 2);
  int mismatches = 0;
  for (int k = 2; k <= 64; ++k) {
    for (int d = -8; d <= 8; ++d) {
      const auto r = degree_obstruction(k, d);
      const bool single = d % (k - 1) == 0;
      const bool pair = (2 * d) % (k - 1) == 0;
      if (r.single_section_solvable != single || r.pair_section_solvable != pair ||
          r.obstructed != (!single && !pair)) {
        ++mismatches;
      }
    }
  }
  return {winding_ok && !k4.single_section_solvable && mismatches == 0,
          fmt("winding=2 for all v: %d; (k=4,d=2) single solvable=%d; divisibility mismatches=%d", winding_ok,
              k4.single_section_solvable, mismatches)};
}

Verdict periodic_witness() {
  auto cfg = config_for(kExample, 8);
  cfg.max_period = 3;
  const auto ex = cmd_scan_periodic(cfg);
  const auto& w = ex.results["witness"];
  const bool found = !w.is_null() && w["period"] == 1 && w["numerator"] == 0 &&
                     std::abs(w["trace"].get<double>() - 2.5) <= 1e-12;
  auto rot = config_for(kRotation, 2);
  rot.max_period = 12;
  const auto control = cmd_scan_periodic(rot);
  const int n_hyp = control.results["n_hyperbolic"];
  const int n_orbits = control.results["n_orbits"];
  return {found && n_hyp == 0,
          fmt("example witness p=0 period 1 trace=%.6f: %d; rotation control: %d hyperbolic of %d orbits",
              w.is_null() ? NAN : w["trace"].get<double>(), found, n_hyp, n_orbits)};
}

Verdict robustness() {
  auto cfg = config_for(kExample, 8);
  cfg.epsilon = 0.05;
  cfg.trials = 200;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = cmd_robustness(cfg);
  const double dt = seconds_since(t0);
  const double base = out.results["baseline"]["value"];
  const double min = out.results["min"];
  return {out.results["all_above_threshold"].get<bool>() && dt < 600.0,
          fmt("lambda(A)=%.6f min=%.6f threshold=%.6f median=%.6f runtime=%.1fs", base, min, 0.5 * base,
              out.results["median"].get<double>(), dt)};
}

Verdict continuity() {
  const auto out = cmd_continuity(config_for(kExample, 8));
  const double rho = out.results["trend"]["spearman"];
  const double worst = out.results["trend"]["max_delta_j_ge_100"];
  std::string deltas;
  for (const auto& row : out.results["rows"]) deltas += fmt("%.1e ", row["delta"].get<double>());
  return {worst <= 0.05 && rho > 0.0,
          fmt("max |delta| for j>=100 = %.2e, spearman=%.3f, deltas (j=10,30,100,300,inf): %s", worst, rho,
              deltas.c_str())};
}

Verdict natext() {
  bool ok = true;
  std::string detail;
  for (int k : {2, 8}) {
    ExperimentConfig cfg;
    cfg.k = k;
    cfg.samples = 1000;
    cfg.depth = 20;
    const auto out = cmd_natext(cfg);
    const auto& r = out.results;
    const bool good = r["delta_certified"] && r["lambda_below_bound"] && r["conjugacy"]["pass"] &&
                      r["injectivity"]["collisions"] == 0;
    ok = ok && good && out.exit_code == kExitOk;
    detail += fmt("k=%d delta=%.4f lambda=%.4g residual=%.2e<=%.2e collisions=%d; ", k,
                  r["realization"]["delta"].get<double>(), r["realization"]["lambda"].get<double>(),
                  r["conjugacy"]["max_residual"].get<double>(), r["conjugacy"]["bound"].get<double>(),
                  r["injectivity"]["collisions"].get<int>());
  }
  return {ok, detail};
}

Verdict determinism() {
  std::vector<std::string> differing;
  for (const auto& name : command_names()) {
    ExperimentConfig cfg = config_for(kExample, 8);
    if (name == "holonomy") cfg.pairs = 30;
    if (name == "natext") cfg.samples = 200;
    std::string first;
    for (int workers : {1, 3, 1}) {
      cfg.workers = workers;
      const std::string dump = run_command(name, cfg).results.dump();
      if (first.empty()) {
        first = dump;
      } else if (dump != first) {
        differing.push_back(name + "(workers=" + std::to_string(workers) + ")");
      }
    }
  }
  std::string detail = fmt("%zu commands x workers {1,3,1}; ", command_names().size());
  detail += differing.empty() ? "all results payloads byte-identical" : "differing:";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"constant-cocycle exactness", constant_exactness},
      {"zero-exponent degenerates", zero_exponent},
      {"cross-estimator agreement", cross_estimator},
      {"bunching arithmetic", bunching_threshold},
      {"holonomy suite", holonomy_suite},
      {"degree suite", degree_suite},
      {"periodic witness", periodic_witness},
      {"robustness", robustness},
      {"continuity trend", continuity},
      {"natural-extension realization", natext},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("[%s] %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
