#include "sl2lab/obstruction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "sl2lab/errors.hpp"
#include "sl2lab/rng.hpp"

namespace sl2lab {

namespace {

constexpr std::uint64_t kSaltSection = 0x73656374;  // "sect"
constexpr double kUnwrapGuard = kPi / 4;
constexpr int kMaxDegreeGrid = 1 << 20;

}  // namespace

ProjectiveLoop::ProjectiveLoop(std::vector<double> angles) : angles_(std::move(angles)) {
  const auto n = angles_.size();
  if (n < 2 || !std::has_single_bit(n)) {
    fail(ErrorKind::domain, "projective loop size must be a power of two >= 2, got " + std::to_string(n));
  }
  for (double& a : angles_) a = normalize_proj_angle(a);
}

ProjPoint ProjectiveLoop::interpolate(double x) const {
  const int n = size();
  const double pos = wrap_unit(x) * n;
  int j = static_cast<int>(std::floor(pos));
  double t = pos - j;
  if (j >= n) {
    j = n - 1;
    t = 1.0;
  }
  const double a = angles_[j];
  const double b = angles_[(j + 1) % n];
  return ProjPoint(a + t * wrap_proj_delta(b - a));
}

double ProjectiveLoop::max_step() const {
  double m = 0.0;
  const int n = size();
  for (int j = 0; j < n; ++j) m = std::max(m, std::abs(wrap_proj_delta(angles_[(j + 1) % n] - angles_[j])));
  return m;
}

bool ProjectiveLoop::resolved() const { return max_step() < kUnwrapGuard; }

int winding_number(const ProjectiveLoop& loop) {
  const auto& a = loop.angles();
  const int n = loop.size();
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double step = wrap_proj_delta(a[(j + 1) % n] - a[j]);
    if (std::abs(step) >= kUnwrapGuard) {
      fail(ErrorKind::resolution, "loop undersampled at sample " + std::to_string(j) + " (step " +
                                      std::to_string(step) + " rad); double the grid");
    }
    total += step;
  }
  return static_cast<int>(std::lround(total / kPi));
}

namespace {

int winding_of_image(const CocycleSpec& spec, Vec2 v, int grid) {
  for (int n = grid; n <= kMaxDegreeGrid; n *= 2) {
    const auto loop = ProjectiveLoop::sample(n, [&](double x) { return ProjPoint::from_vector(spec.evaluate_raw(x) * v); });
    if (loop.resolved()) return winding_number(loop);
  }
  fail(ErrorKind::resolution, "twist loop still undersampled at grid " + std::to_string(kMaxDegreeGrid));
}

}  // namespace

int twist_degree(const CocycleSpec& spec, int grid) {
  const int d1 = winding_of_image(spec, {1.0, 0.0}, grid);
  const int d2 = winding_of_image(spec, {0.0, 1.0}, grid);
  if (d1 != d2) {
    fail(ErrorKind::internal, "twist degree depends on the test vector (" + std::to_string(d1) + " vs " +
                                  std::to_string(d2) + ")");
  }
  return d1;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) fail(ErrorKind::domain, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

ObstructionReport degree_obstruction(int k, int d) {
  if (k < 2) fail(ErrorKind::domain, "degree obstruction needs k >= 2");
  ObstructionReport r;
  r.k = k;
  r.twist_degree = d;
  r.single_degree = make_rational(d, k - 1);
  r.single_section_solvable = r.single_degree.is_integer();
  r.pair_degree = make_rational(2 * static_cast<std::int64_t>(d), k - 1);
  r.pair_section_solvable = r.pair_degree.is_integer();
  r.obstructed = !r.single_section_solvable && !r.pair_section_solvable;
  return r;
}

double section_residual(const CocycleSpec& spec, const ExpandingMap& map, const ProjectiveLoop& loop) {
  const int n = loop.size();
  const int k = map.k();
  std::vector<ProjPoint> pts(static_cast<std::size_t>(k) + 1);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const double y = static_cast<double>(j) / n;
    pts[0] = loop.at(j);
    for (int i = 0; i < k; ++i) {
      const double x = map.inverse_branch(y, i);
      pts[i + 1] = projective_action(spec.evaluate(x), loop.interpolate(x));
    }
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) worst = std::max(worst, proj_distance(pts[a], pts[b]));
    }
  }
  return worst;
}

SectionSearchResult section_consistency_search(const CocycleSpec& spec, const ExpandingMap& map, int grid_n,
                                               int n_iterations, std::uint64_t seed, int direction_steps) {
  if (n_iterations < 1) fail(ErrorKind::domain, "section search needs n_iterations >= 1");
  std::vector<double> angles(static_cast<std::size_t>(grid_n), 0.0);
  SectionSearchResult out;
  try {
    for (int j = 0; j < grid_n; ++j) {
      Rng rng(seed, static_cast<std::uint64_t>(j), kSaltSection);
      DigitStreamOrbit orbit(map.k(), static_cast<double>(j) / grid_n, rng);
      angles[j] = stable_direction_along(spec, orbit, direction_steps).angle();
    }
  } catch (const LabError& e) {
    if (e.kind() != ErrorKind::no_hyperbolicity) throw;
    std::fill(angles.begin(), angles.end(), 0.0);
    out.seeded_from_oseledets = false;
  }

  ProjectiveLoop loop(std::move(angles));
  out.best_loop = loop;
  out.residual = section_residual(spec, map, loop);
  out.residual_trace.push_back(out.residual);
  for (int it = 0; it < n_iterations; ++it) {
    std::vector<double> next(static_cast<std::size_t>(grid_n));
    for (int j = 0; j < grid_n; ++j) {
      const double x = map.inverse_branch(static_cast<double>(j) / grid_n, 0);
      next[j] = projective_action(spec.evaluate(x), loop.interpolate(x)).angle();
    }
    loop = ProjectiveLoop(std::move(next));
    const double r = section_residual(spec, map, loop);
    out.residual_trace.push_back(r);
    if (r < out.residual) {
      out.residual = r;
      out.best_loop = loop;
    }
  }
  out.final_residual = out.residual_trace.back();
  return out;
}

}  // namespace sl2lab
