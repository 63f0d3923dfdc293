#include "sl2lab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sl2lab/errors.hpp"
#include "sl2lab/parallel.hpp"
#include "sl2lab/rng.hpp"

namespace sl2lab {

namespace {

constexpr std::uint64_t kSaltNormGrowth = 0x6e6f726d;  // "norm"
constexpr std::uint64_t kSaltFurstenberg = 0x66757273; // "furs"
constexpr std::uint64_t kSaltTwist = 0x74776973;       // "twis"

constexpr double kLn2 = 0.69314718055994530942;
// Rebalance the unit factor once its largest entry leaves [2^-64, 2^64].
constexpr double kRebalanceHigh = 0x1.0p64;
constexpr double kRebalanceLow = 0x1.0p-64;

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& v) {
  MeanAndError out;
  if (v.empty()) return out;
  const double n = static_cast<double>(v.size());
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

}  // namespace

CocycleSpec::CocycleSpec(Mat2 base, int winding, std::vector<TwistTerm> twist, double theta)
    : base_(base), winding_(winding), twist_(std::move(twist)), theta_(theta) {
  if (!(theta > 0.0 && theta <= 1.0)) fail(ErrorKind::domain, "hoelder theta must lie in (0, 1]");
  for (const auto& t : twist_) {
    if (!std::isfinite(t.amp) || !std::isfinite(t.phase)) fail(ErrorKind::domain, "non-finite twist coefficient");
  }
}

double CocycleSpec::twist_angle(double x) const {
  double g = winding_ * x;
  for (const auto& t : twist_) g += t.amp * std::cos(kTwoPi * t.freq * x + t.phase);
  return g;
}

double CocycleSpec::twist_difference(double x, double delta) const {
  double g = winding_ * delta;
  for (const auto& t : twist_) {
    g -= 2.0 * t.amp * std::sin(kTwoPi * t.freq * x + kPi * t.freq * delta + t.phase) * std::sin(kPi * t.freq * delta);
  }
  return g;
}

double CocycleSpec::twist_slope_bound() const {
  double s = std::abs(static_cast<double>(winding_));
  for (const auto& t : twist_) s += kTwoPi * std::abs(static_cast<double>(t.freq)) * std::abs(t.amp);
  return s;
}

double CocycleSpec::lipschitz_bound() const { return base_.norm() * kTwoPi * twist_slope_bound(); }

Matrix2 CocycleSpec::evaluate_raw(double x) const {
  const double angle = kTwoPi * twist_angle(x);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Matrix2& m = base_.raw();
  return {m.a * c + m.b * s, m.b * c - m.a * s, m.c * c + m.d * s, m.d * c - m.c * s};
}

Mat2 CocycleSpec::evaluate(double x) const { return Mat2(evaluate_raw(x)); }

// ---------------------------------------------------------------------------

void ScaledProduct::left_multiply(const Matrix2& m) {
  unit = m * unit;
  rebalance();
}

void ScaledProduct::right_multiply(const Matrix2& m) {
  unit = unit * m;
  rebalance();
}

void ScaledProduct::rebalance() {
  const double ma = unit.max_abs();
  if (ma <= kRebalanceHigh && ma >= kRebalanceLow) return;
  if (!std::isfinite(ma) || ma == 0.0) fail(ErrorKind::numeric_overflow, "scaled product lost its unit factor");
  int e = 0;
  std::frexp(ma, &e);
  unit = unit * std::ldexp(1.0, -e);
  log_scale += e * kLn2;
}

double ScaledProduct::log_norm() const { return log_scale + std::log(op_norm(unit)); }

Mat2 ScaledProduct::matrix() const {
  const double factor = std::exp(log_scale);
  const Matrix2 m = unit * factor;
  if (!std::isfinite(factor) || !m.finite()) {
    fail(ErrorKind::numeric_overflow, "product norm exp(" + std::to_string(log_norm()) + ") is not representable");
  }
  return Mat2(m);
}

ScaledProduct cocycle_product(const CocycleSpec& spec, const ExpandingMap& map, double x, int64_t n) {
  if (n < 0) fail(ErrorKind::domain, "cocycle_product needs n >= 0");
  MapOrbit orbit(map, x);
  return forward_product(spec, orbit, n);
}

const char* to_string(LyapunovMethod m) {
  return m == LyapunovMethod::norm_growth ? "norm-growth" : "furstenberg-sstate";
}

LyapunovEstimate lyapunov_norm_growth(const CocycleSpec& spec, const ExpandingMap& map, int64_t n_steps,
                                      int n_samples, std::uint64_t seed, EstimatorOptions opts) {
  if (n_steps < 1 || n_samples < 1) fail(ErrorKind::domain, "norm-growth estimator needs n_steps, n_samples >= 1");
  std::vector<double> values(static_cast<std::size_t>(n_samples));
  parallel_for(values.size(), opts.workers, [&](std::size_t i) {
    Rng rng(seed, i, kSaltNormGrowth);
    DigitStreamOrbit orbit(map.k(), rng);
    values[i] = forward_product(spec, orbit, n_steps).log_norm() / static_cast<double>(n_steps);
  });
  const auto stats = mean_and_error(values);
  LyapunovEstimate est;
  est.value = stats.mean;
  est.std_error = stats.std_error;
  est.n_steps = n_steps;
  est.n_samples = n_samples;
  est.seed = seed;
  est.method = LyapunovMethod::norm_growth;
  est.sample_values = std::move(values);
  return est;
}

ProjPoint oseledets_stable_direction(const CocycleSpec& spec, const ExpandingMap& map, double x, int n,
                                     double min_gap) {
  if (n < 1) fail(ErrorKind::domain, "oseledets_stable_direction needs n >= 1");
  MapOrbit orbit(map, x);
  return stable_direction_along(spec, orbit, n, min_gap);
}

double phi(const CocycleSpec& spec, double x, ProjPoint v) {
  const Vec2 w = spec.evaluate_raw(x) * v.unit();
  return std::log(w.norm());
}

namespace {

struct BufferOrbit {
  const std::vector<double>& points;
  std::size_t i = 0;
  double current() const { return points[i]; }
  void advance() { ++i; }
};

}  // namespace

LyapunovEstimate lyapunov_furstenberg(const CocycleSpec& spec, const ExpandingMap& map, int64_t n_steps,
                                      int n_samples, std::uint64_t seed, EstimatorOptions opts) {
  const int block = opts.direction_steps;
  if (n_steps < 1 || n_samples < 1 || block < 1) {
    fail(ErrorKind::domain, "furstenberg estimator needs n_steps, n_samples, direction_steps >= 1");
  }
  const int64_t n_blocks = std::max<int64_t>(1, n_steps / block);
  std::vector<double> values(static_cast<std::size_t>(n_samples));
  std::vector<char> degenerate(values.size(), 0);
  parallel_for(values.size(), opts.workers, [&](std::size_t i) {
    Rng rng(seed, i, kSaltFurstenberg);
    DigitStreamOrbit orbit(map.k(), rng);
    std::vector<double> window(static_cast<std::size_t>(block));
    double sum = 0.0;
    try {
      for (int64_t b = 0; b < n_blocks; ++b) {
        for (auto& x : window) {
          x = orbit.current();
          orbit.advance();
        }
        BufferOrbit view{window};
        const ProjPoint stable = stable_direction_along(spec, view, block);
        sum -= phi(spec, window[0], stable);
      }
      values[i] = sum / static_cast<double>(n_blocks);
    } catch (const LabError& e) {
      if (e.kind() != ErrorKind::no_hyperbolicity) throw;
      degenerate[i] = 1;
    }
  });

  LyapunovEstimate est;
  est.n_steps = n_blocks * block;
  est.n_samples = n_samples;
  est.seed = seed;
  est.method = LyapunovMethod::furstenberg_sstate;
  if (std::any_of(degenerate.begin(), degenerate.end(), [](char c) { return c != 0; })) {
    est.degenerate = true;
    return est;
  }
  const auto stats = mean_and_error(values);
  est.value = stats.mean;
  est.std_error = stats.std_error;
  est.sample_values = std::move(values);
  return est;
}

BunchingResult u_bunching_check(const CocycleSpec& spec, const ExpandingMap& map, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) fail(ErrorKind::domain, "bunching theta must lie in (0, 1]");
  const double contraction = std::pow(map.sigma(), -theta);
  BunchingResult out;
  out.theta = theta;
  double max_norm = 0.0;
  for (int j = 0; j < kCertificationGrid; ++j) {
    const Mat2 a = spec.evaluate(static_cast<double>(j) / kCertificationGrid);
    const double n = a.norm();
    max_norm = std::max(max_norm, n);
    // ||A^-1|| = ||A|| in SL(2), but compute it anyway.
    out.grid_max = std::max(out.grid_max, n * a.inverse().norm() * contraction);
  }
  // |d/dx ||A||^2| <= 2 sup||A|| * Lip(A); the grid misses at most half a spacing.
  const double lipschitz = 2.0 * max_norm * spec.lipschitz_bound() * contraction;
  out.grid_error = lipschitz * 0.5 / kCertificationGrid;
  out.margin = 1.0 - (out.grid_max + out.grid_error);
  out.bunched = out.margin > 0.0;
  return out;
}

SupDistance sup_distance(const CocycleSpec& a, const CocycleSpec& b, int grid) {
  if (grid < 1) fail(ErrorKind::domain, "sup_distance grid must be positive");
  SupDistance out;
  for (int j = 0; j < grid; ++j) {
    const double x = static_cast<double>(j) / grid;
    out.grid_max = std::max(out.grid_max, op_norm(a.evaluate_raw(x) - b.evaluate_raw(x)));
  }
  out.upper_bound = out.grid_max + (a.lipschitz_bound() + b.lipschitz_bound()) * 0.5 / grid;
  return out;
}

std::vector<TwistTerm> random_unit_twist(std::uint64_t seed) {
  constexpr int kDegree = 8;
  Rng rng(seed, 0, kSaltTwist);
  std::vector<TwistTerm> terms;
  double total = 0.0;
  for (int f = 0; f <= kDegree; ++f) {
    TwistTerm t;
    t.freq = f;
    t.amp = rng.uniform();
    t.phase = kTwoPi * rng.uniform();
    total += t.amp;
    terms.push_back(t);
  }
  for (auto& t : terms) t.amp /= total;
  return terms;
}

CocycleSpec add_twist(const CocycleSpec& spec, const std::vector<TwistTerm>& h, double scale) {
  std::vector<TwistTerm> twist = spec.twist();
  for (auto t : h) {
    t.amp *= scale;
    twist.push_back(t);
  }
  return CocycleSpec(spec.base(), spec.winding(), std::move(twist), spec.theta());
}

CocycleSpec perturb(const CocycleSpec& spec, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::domain, "perturbation size must be >= 0");
  if (epsilon == 0.0) return spec;
  return add_twist(spec, random_unit_twist(seed), epsilon);
}

CocycleSpec conjugate(const CocycleSpec& spec, double radians) {
  const Mat2 r = Mat2::rotation(radians);
  return CocycleSpec(r * spec.base() * r.inverse(), spec.winding(), spec.twist(), spec.theta());
}

}  // namespace sl2lab
