#include "sl2lab/natext.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sl2lab/errors.hpp"

namespace sl2lab {

double plateau_profile(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  // 1 / (1 + psi(s)/psi(1-s)) with psi(u) = exp(-1/u)
  const double u = 1.0 / (1.0 - s) - 1.0 / s;
  return 1.0 / (1.0 + std::exp(u));
}

double plateau_profile_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double u = 1.0 / (1.0 - s) - 1.0 / s;
  const double du = 1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s);
  const double p = 1.0 / (1.0 + std::exp(u));
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * (1.0 - p) * du;
}

double NatExtRealization::bump(int i, double x) const {
  const double t = circle_distance(x, centers[i]);
  return plateau_profile((t - inner_radius) / (outer_radius - inner_radius));
}

std::vector<double> NatExtRealization::h(double x) const {
  std::vector<double> out(static_cast<std::size_t>(n_charts));
  for (int i = 0; i < n_charts; ++i) out[i] = bump(i, x);
  return out;
}

namespace {

double distance_sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

double separation_grid_min(const NatExtRealization& real, int grid) {
  const int k = real.map.k();
  double best = INFINITY;
  for (int g = 0; g < grid; ++g) {
    const double x = static_cast<double>(g) / grid;
    const auto hx = real.h(x);
    for (int j = 1; j < k; ++j) {
      best = std::min(best, distance_sq(hx, real.h(wrap_unit(x + static_cast<double>(j) / k))));
    }
  }
  return std::sqrt(best);
}

NatExtRealization build_realization(const ExpandingMap& map) {
  constexpr int kGrid = 4096;
  NatExtRealization r;
  const int k = map.k();
  r.map = map;
  r.n_charts = 2 * k;
  r.inner_radius = 1.0 / (4.0 * k);
  r.outer_radius = 3.0 / (8.0 * k);
  for (int i = 0; i < r.n_charts; ++i) r.centers.push_back(static_cast<double>(i) / r.n_charts);

  r.delta_grid_min = separation_grid_min(r, kGrid);
  // Each coordinate of h has slope <= kPlateauSlopeBound/(outer - inner); the
  // transition zones of different charts are disjoint, so |h'| is bounded by
  // that times sqrt(2) with room to spare. x -> |h(x) - h(x + j/k)| then has
  // Lipschitz constant at most twice |h'|.
  const double h_slope = std::sqrt(2.0) * kPlateauSlopeBound / (r.outer_radius - r.inner_radius);
  r.delta_grid_error = 2.0 * h_slope * 0.5 / kGrid;
  r.delta = r.delta_grid_min - r.delta_grid_error;
  if (!(r.delta > 0.0)) {
    fail(ErrorKind::internal, "separation constant not certified positive for k = " + std::to_string(k));
  }
  r.lambda = 0.9 * r.delta / (4.0 * r.n_charts);
  return r;
}

NatExtPoint apply_g(const NatExtRealization& real, double x, std::span<const double> v) {
  if (static_cast<int>(v.size()) != real.n_charts) fail(ErrorKind::domain, "fiber vector has the wrong dimension");
  double norm_sq = 0.0;
  for (double c : v) norm_sq += c * c;
  if (!(norm_sq < 1.0)) fail(ErrorKind::domain, "fiber point must lie in the open unit ball");
  NatExtPoint out;
  out.base = real.map.apply(x);
  out.fiber = real.h(x);
  const double inv = 1.0 / (2.0 * real.n_charts);
  for (int i = 0; i < real.n_charts; ++i) out.fiber[i] = out.fiber[i] * inv + real.lambda * v[i];
  return out;
}

int required_depth(const NatExtRealization& real, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) fail(ErrorKind::domain, "iota tolerance must lie in (0, 1)");
  return static_cast<int>(std::ceil(std::log(tol) / std::log(real.lambda)));
}

std::vector<HighPrecision> exact_backward_orbit(const BackwardItinerary& it) {
  std::vector<HighPrecision> out;
  out.reserve(static_cast<std::size_t>(it.depth()) + 1);
  HighPrecision x = it.anchor();
  out.push_back(x);
  for (int d : it.digits()) {
    x = (x + d) / it.k();
    out.push_back(x);
  }
  return out;
}

ExactNatExtPoint iota_exact(const NatExtRealization& real, std::span<const HighPrecision> orbit, int depth,
                            int first) {
  if (first < 0 || depth < 0 || first + depth >= static_cast<int>(orbit.size())) {
    throw DepthError("backward orbit too short for iota at depth " + std::to_string(depth), first + depth);
  }
  const HighPrecision scale = HighPrecision(1) / (2 * real.n_charts);
  const HighPrecision lambda = real.lambda;
  std::vector<HighPrecision> v(static_cast<std::size_t>(real.n_charts), HighPrecision(0));
  for (int n = first + depth; n > first; --n) {
    const auto hx = real.h(static_cast<double>(orbit[n]));
    for (int i = 0; i < real.n_charts; ++i) v[i] = hx[i] * scale + lambda * v[i];
  }
  return {orbit[first], std::move(v)};
}

ExactNatExtPoint apply_g_exact(const NatExtRealization& real, const ExactNatExtPoint& p) {
  const HighPrecision scale = HighPrecision(1) / (2 * real.n_charts);
  const HighPrecision lambda = real.lambda;
  ExactNatExtPoint out;
  HighPrecision y = p.base * real.map.k();
  out.base = y - floor(y);
  const auto hx = real.h(static_cast<double>(p.base));
  out.fiber.resize(p.fiber.size());
  for (std::size_t i = 0; i < p.fiber.size(); ++i) out.fiber[i] = hx[i] * scale + lambda * p.fiber[i];
  return out;
}

HighPrecision natext_distance(const ExactNatExtPoint& p, const ExactNatExtPoint& q) {
  HighPrecision db = abs(p.base - q.base);
  db = db - floor(db);
  if (db > 0.5) db = 1 - db;
  HighPrecision s = db * db;
  for (std::size_t i = 0; i < p.fiber.size(); ++i) s += (p.fiber[i] - q.fiber[i]) * (p.fiber[i] - q.fiber[i]);
  return sqrt(s);
}

IotaResult iota(const NatExtRealization& real, const BackwardItinerary& it, double tol) {
  const int need = required_depth(real, tol);
  if (it.depth() < need) {
    throw DepthError("itinerary depth " + std::to_string(it.depth()) + " too shallow; tolerance " +
                         std::to_string(tol) + " needs depth " + std::to_string(need),
                     need);
  }
  const auto orbit = exact_backward_orbit(it);
  const auto p = iota_exact(real, orbit, it.depth());
  IotaResult out;
  out.depth = it.depth();
  out.radius = std::pow(real.lambda, it.depth());
  out.point.base = static_cast<double>(p.base);
  for (const auto& c : p.fiber) out.point.fiber.push_back(static_cast<double>(c));
  return out;
}

double conjugacy_residual(const NatExtRealization& real, const BackwardItinerary& it, int depth) {
  if (it.depth() < depth + 1) {
    throw DepthError("conjugacy check at depth " + std::to_string(depth) + " needs itinerary depth " +
                         std::to_string(depth + 1),
                     depth + 1);
  }
  const auto orbit = exact_backward_orbit(it);
  const auto direct = iota_exact(real, orbit, depth, 0);
  const auto pulled = iota_exact(real, orbit, depth, 1);  // iota(f^-1 x^)
  return static_cast<double>(natext_distance(apply_g_exact(real, pulled), direct));
}

}  // namespace sl2lab
