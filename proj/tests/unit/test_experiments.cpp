#include <catch_amalgamated.hpp>

#include <cmath>

#include "sl2lab/experiments.hpp"

using namespace sl2lab;
using Catch::Approx;

namespace {

ExperimentConfig with_spec(const CocycleSpec& spec, int k = 8) {
  ExperimentConfig cfg;
  cfg.spec = spec;
  cfg.k = k;
  return cfg;
}

const CocycleSpec kExample = CocycleSpec::full_twist(Mat2::diag(2.0));

}  // namespace

TEST_CASE("spearman", "[experiments]") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 2}) == Approx(std::sqrt(0.75)));
  CHECK(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
}

TEST_CASE("lyap on constant cocycles", "[experiments]") {
  const auto diag = cmd_lyap(with_spec(CocycleSpec::constant(Mat2::diag(2.0))));
  CHECK(diag.results["value"].get<double>() == Approx(std::log(2.0)).margin(1e-6));
  CHECK(diag.results["cross_check"]["pass"] == true);
  CHECK(diag.exit_code == kExitOk);

  const auto id = cmd_lyap(with_spec(CocycleSpec::constant(Mat2::identity())));
  CHECK(id.results["value"].get<double>() == 0.0);
  CHECK(id.results["furstenberg"]["degenerate"] == true);
  CHECK(id.exit_code == kExitOk);

  auto bad = with_spec(kExample);
  bad.method = "median";
  CHECK_THROWS_AS(cmd_lyap(bad), LabError);
}

TEST_CASE("lyap cross-check on the example", "[experiments]") {
  const auto out = cmd_lyap(with_spec(kExample));
  CHECK(out.results["cross_check"]["pass"] == true);
  CHECK(out.results["value"].get<double>() > 0.1);
}

TEST_CASE("robustness with zero perturbation reproduces the baseline", "[experiments]") {
  auto cfg = with_spec(kExample);
  cfg.epsilon = 0.0;
  cfg.trials = 4;
  const auto out = cmd_robustness(cfg);
  const double base = out.results["baseline"]["value"];
  const double err = out.results["baseline"]["std_error"];
  for (const auto& t : out.results["trials"]) CHECK(std::abs(t["value"].get<double>() - base) <= err);
  CHECK(out.results["fraction_below_threshold"] == 0.0);
}

TEST_CASE("continuity table ends with the unperturbed row", "[experiments]") {
  auto cfg = with_spec(kExample);
  cfg.steps = 5000;
  cfg.samples = 8;
  const auto out = cmd_continuity(cfg);
  const auto& rows = out.results["rows"];
  REQUIRE(rows.size() == 5);
  CHECK(rows.back()["j"] == "inf");
  CHECK(rows.back()["delta"] == 0.0);
  // C0 distances shrink along the sequence
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(rows[i]["c0_distance"].get<double>() < rows[i - 1]["c0_distance"].get<double>());
  }
}

TEST_CASE("scan-periodic", "[experiments]") {
  auto cfg = with_spec(kExample);
  cfg.max_period = 2;
  const auto ex = cmd_scan_periodic(cfg);
  REQUIRE_FALSE(ex.results["witness"].is_null());
  CHECK(ex.results["witness"]["numerator"] == 0);
  CHECK(ex.results["witness"]["period"] == 1);
  CHECK(ex.results["witness"]["trace"].get<double>() == Approx(2.5));

  auto id = with_spec(CocycleSpec::constant(Mat2::identity()), 3);
  id.max_period = 5;
  CHECK(cmd_scan_periodic(id).results["n_hyperbolic"] == 0);

  auto huge = with_spec(kExample);
  huge.max_period = 40;
  CHECK_THROWS_AS(cmd_scan_periodic(huge), LabError);
}

TEST_CASE("thin drivers", "[experiments]") {
  const auto deg = cmd_degree(with_spec(kExample));
  CHECK(deg.results["twist_degree"] == 2);
  CHECK(deg.results["k"] == 8);
  CHECK(deg.results["obstructed"] == true);

  const auto b = cmd_bunching(with_spec(kExample));
  CHECK(b.results["bunched"] == true);
  CHECK(b.results["margin"].get<double>() == Approx(0.5).margin(b.results["grid_error"].get<double>() + 1e-12));

  auto h = with_spec(kExample);
  h.pairs = 10;
  const auto hol = cmd_holonomy(h);
  CHECK(hol.exit_code == kExitOk);
  CHECK(hol.results["n_converged"] == 10);

  auto h2 = with_spec(kExample, 2);
  h2.pairs = 20;
  h2.offset = 0.1;
  const auto hol2 = cmd_holonomy(h2);
  CHECK(hol2.results["bunching"]["bunched"] == false);
  CHECK(hol2.results["n_equivariance"] == 0);

  ExperimentConfig n;
  n.k = 2;
  n.samples = 100;
  const auto nat = cmd_natext(n);
  CHECK(nat.exit_code == kExitOk);
  CHECK(nat.results["conjugacy"]["pass"] == true);
  CHECK(nat.results["injectivity"]["collisions"] == 0);
}

TEST_CASE("config merging", "[experiments]") {
  ExperimentConfig cfg;
  merge_config(cfg, Json::parse(R"({"k": 3, "seed": 9, "steps": 100, "spec": {"base": [[1, 0], [0, 1]]}})"), "");
  CHECK(cfg.k == 3);
  CHECK(cfg.seed == 9);
  CHECK(cfg.steps == 100);
  CHECK(cfg.spec.has_value());
  CHECK_THROWS_AS(merge_config(cfg, Json::parse(R"({"stpes": 100})"), ""), LabError);
  CHECK_THROWS_AS(merge_config(cfg, Json::parse(R"({"k": "eight"})"), ""), LabError);
  CHECK_THROWS_AS(run_command("lyapunov", cfg), LabError);
  CHECK_THROWS_AS(cmd_lyap(ExperimentConfig{}), LabError);
}

TEST_CASE("exit code mapping", "[experiments]") {
  CHECK(exit_code_for(ErrorKind::config) == kExitConfig);
  CHECK(exit_code_for(ErrorKind::range) == kExitConfig);
  CHECK(exit_code_for(ErrorKind::numeric_overflow) == kExitNumeric);
  CHECK(exit_code_for(ErrorKind::convergence) == kExitNumeric);
}

TEST_CASE("csv output", "[experiments]") {
  CsvTable t;
  t.columns = {"j", "delta"};
  t.rows.push_back({10, 0.5});
  t.rows.push_back({"inf", nullptr});
  CHECK(to_csv(t) == "j,delta\n10,0.5\ninf,\n");
}
