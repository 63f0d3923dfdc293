#include "sl2lab/serialization.hpp"

#include <fstream>
#include <sstream>

#include "sl2lab/errors.hpp"

namespace sl2lab {

Json to_json(const Matrix2& m) { return Json::array({Json::array({m.a, m.b}), Json::array({m.c, m.d})}); }
Json to_json(const Mat2& m) { return to_json(m.raw()); }

Json to_json(const CocycleSpec& spec) {
  Json twist = Json::array();
  for (const auto& t : spec.twist()) twist.push_back({{"freq", t.freq}, {"amp", t.amp}, {"phase", t.phase}});
  return {{"base", to_json(spec.base())}, {"winding", spec.winding()}, {"twist", twist}, {"theta", spec.theta()}};
}

Json to_json(const LyapunovEstimate& est, bool with_samples) {
  Json j = {{"method", to_string(est.method)},
            {"value", est.value},
            {"std_error", est.std_error},
            {"n_steps", est.n_steps},
            {"n_samples", est.n_samples},
            {"seed", est.seed},
            {"degenerate", est.degenerate}};
  if (with_samples) j["sample_values"] = est.sample_values;
  return j;
}

Json to_json(const BunchingResult& r) {
  return {{"bunched", r.bunched},
          {"margin", r.margin},
          {"grid_max", r.grid_max},
          {"grid_error", r.grid_error},
          {"theta", r.theta}};
}

Json to_json(const Rational& r) { return {{"num", r.num}, {"den", r.den}}; }

Json to_json(const ObstructionReport& r) {
  return {{"k", r.k},
          {"twist_degree", r.twist_degree},
          {"single_section_solvable", r.single_section_solvable},
          {"single_degree", to_json(r.single_degree)},
          {"pair_section_solvable", r.pair_section_solvable},
          {"pair_degree", to_json(r.pair_degree)},
          {"obstructed", r.obstructed}};
}

Json to_json(const HolonomyResult& r) {
  return {{"h", to_json(r.h)},
          {"depth_used", r.depth_used},
          {"cauchy_residual", r.cauchy_residual},
          {"converged", r.converged},
          {"residual_trace", r.residual_trace}};
}

Json to_json(const NatExtRealization& r) {
  return {{"k", r.map.k()},
          {"n_charts", r.n_charts},
          {"ambient_dim", r.ambient_dim()},
          {"centers", r.centers},
          {"inner_radius", r.inner_radius},
          {"outer_radius", r.outer_radius},
          {"delta", r.delta},
          {"delta_grid_min", r.delta_grid_min},
          {"delta_grid_error", r.delta_grid_error},
          {"lambda", r.lambda},
          {"lambda_bound", r.delta / (4.0 * r.n_charts)}};
}

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::config, "cocycle spec field '" + field + "': " + what);
}

double number_at(const Json& j, const std::string& field) {
  if (!j.is_number()) config_error(field, "expected a number");
  return j.get<double>();
}

int integer_at(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) config_error(field, "expected an integer");
  return j.get<int>();
}

}  // namespace

CocycleSpec cocycle_from_json(const Json& j) {
  if (!j.is_object()) config_error("<root>", "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "base" && key != "winding" && key != "twist" && key != "theta") config_error(key, "unknown field");
  }
  if (!j.contains("base")) config_error("base", "missing");
  const Json& b = j.at("base");
  if (!b.is_array() || b.size() != 2 || !b[0].is_array() || b[0].size() != 2 || !b[1].is_array() || b[1].size() != 2) {
    config_error("base", "expected [[a, b], [c, d]]");
  }
  const Matrix2 raw{number_at(b[0][0], "base[0][0]"), number_at(b[0][1], "base[0][1]"),
                    number_at(b[1][0], "base[1][0]"), number_at(b[1][1], "base[1][1]")};
  if (!(raw.det() > 0.0)) config_error("base", "determinant must be positive (it is renormalized to 1)");

  const int winding = j.contains("winding") ? integer_at(j.at("winding"), "winding") : 0;
  std::vector<TwistTerm> twist;
  if (j.contains("twist")) {
    const Json& t = j.at("twist");
    if (!t.is_array()) config_error("twist", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string at = "twist[" + std::to_string(i) + "]";
      if (!t[i].is_object()) config_error(at, "expected {freq, amp, phase}");
      TwistTerm term;
      term.freq = t[i].contains("freq") ? integer_at(t[i].at("freq"), at + ".freq") : 0;
      if (!t[i].contains("amp")) config_error(at + ".amp", "missing");
      term.amp = number_at(t[i].at("amp"), at + ".amp");
      term.phase = t[i].contains("phase") ? number_at(t[i].at("phase"), at + ".phase") : 0.0;
      twist.push_back(term);
    }
  }
  const double theta = j.contains("theta") ? number_at(j.at("theta"), "theta") : 1.0;
  if (!(theta > 0.0 && theta <= 1.0)) config_error("theta", "must lie in (0, 1]");
  return CocycleSpec(Mat2(raw), winding, std::move(twist), theta);
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::config, source + ": " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

}  // namespace sl2lab
