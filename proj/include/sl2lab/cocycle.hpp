#pragma once

// Twisted-constant cocycles A(x) = A0 * R(g(x)) over x -> kx, where R(t) is
// rotation by 2*pi*t and g(x) = w*x + sum_j amp_j cos(2*pi*freq_j*x + phase_j)
// with integer winding w. The family is closed under the C0 perturbations
// used in the robustness experiments: B = A * R(eps*h) only appends terms.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sl2lab/circle.hpp"
#include "sl2lab/errors.hpp"
#include "sl2lab/sl2.hpp"

namespace sl2lab {

struct TwistTerm {
  int freq = 0;
  double amp = 0.0;
  double phase = 0.0;

  bool operator==(const TwistTerm&) const = default;
};

class CocycleSpec {
 public:
  CocycleSpec() = default;
  explicit CocycleSpec(Mat2 base, int winding = 0, std::vector<TwistTerm> twist = {}, double theta = 1.0);

  /// A(x) = base for all x.
  static CocycleSpec constant(Mat2 base) { return CocycleSpec(base); }
  /// The full-twist family A(x) = base * R_x.
  static CocycleSpec full_twist(Mat2 base) { return CocycleSpec(base, 1); }

  const Mat2& base() const { return base_; }
  int winding() const { return winding_; }
  const std::vector<TwistTerm>& twist() const { return twist_; }
  double theta() const { return theta_; }

  /// g(x), in turns.
  double twist_angle(double x) const;
  /// g(x + delta) - g(x) without cancellation for small delta.
  double twist_difference(double x, double delta) const;
  /// Upper bound on sup |g'|.
  double twist_slope_bound() const;
  /// Upper bound on the Lipschitz constant of x -> A(x) in operator norm.
  double lipschitz_bound() const;

  Mat2 evaluate(double x) const;
  /// Same value without the det renormalization; used in long products.
  Matrix2 evaluate_raw(double x) const;

  bool operator==(const CocycleSpec&) const = default;

 private:
  Mat2 base_;
  int winding_ = 0;
  std::vector<TwistTerm> twist_;
  double theta_ = 1.0;
};

inline Mat2 evaluate(const CocycleSpec& spec, double x) { return spec.evaluate(x); }

/// A product kept as exp(log_scale) * unit, with `unit` rescaled by powers of
/// two so neither overflow nor underflow occurs for very long orbits.
struct ScaledProduct {
  Matrix2 unit = Matrix2::identity();
  double log_scale = 0.0;

  void left_multiply(const Matrix2& m);
  void right_multiply(const Matrix2& m);
  void rebalance();
  /// log of the operator norm of the represented matrix.
  double log_norm() const;
  /// The represented matrix; throws numeric_overflow when it is not representable.
  Mat2 matrix() const;
};

/// A^n(x) = A(f^{n-1}x) ... A(x) along the floating-point orbit of x.
ScaledProduct cocycle_product(const CocycleSpec& spec, const ExpandingMap& map, double x, int64_t n);

/// Forward product along any orbit object exposing current()/advance().
template <typename Orbit>
ScaledProduct forward_product(const CocycleSpec& spec, Orbit& orbit, int64_t n) {
  ScaledProduct p;
  for (int64_t i = 0; i < n; ++i) {
    p.left_multiply(spec.evaluate_raw(orbit.current()));
    orbit.advance();
  }
  return p;
}

enum class LyapunovMethod { norm_growth, furstenberg_sstate };
const char* to_string(LyapunovMethod m);

struct LyapunovEstimate {
  double value = 0.0;  // nats per iteration
  double std_error = 0.0;
  int64_t n_steps = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  LyapunovMethod method = LyapunovMethod::norm_growth;
  /// Set when the estimator could not resolve a stable direction; value is then 0.
  bool degenerate = false;
  std::vector<double> sample_values;
};

struct EstimatorOptions {
  int workers = 1;
  int direction_steps = 100;
};

/// Mean over Lebesgue-random seeds of (1/n) log ||A^n(x)||, with the standard
/// error taken across samples.
LyapunovEstimate lyapunov_norm_growth(const CocycleSpec& spec, const ExpandingMap& map, int64_t n_steps,
                                      int n_samples, std::uint64_t seed, EstimatorOptions opts = {});

/// Oseledets gap threshold s_max/s_min required before a stable direction is trusted.
inline constexpr double kStableDirectionGap = 1e3;

/// Right singular direction of A^n(x) for the small singular value. Throws
/// no_hyperbolicity when s_max/s_min < min_gap.
ProjPoint oseledets_stable_direction(const CocycleSpec& spec, const ExpandingMap& map, double x, int n,
                                     double min_gap = kStableDirectionGap);

/// Same, along an arbitrary orbit (typically a DigitStreamOrbit).
template <typename Orbit>
ProjPoint stable_direction_along(const CocycleSpec& spec, Orbit& orbit, int n, double min_gap = kStableDirectionGap);

/// log |A(x) v| for the unit vector v in direction p.
double phi(const CocycleSpec& spec, double x, ProjPoint v);

/// lambda = -E[phi(x, E^s(x))]. Each sample walks a random orbit of n_steps in
/// blocks of opts.direction_steps; E^s at the head of a block comes from the
/// block's own forward product, and the sample value is the block average. If
/// any block lacks an Oseledets gap the estimate is reported as a degenerate
/// zero instead of an average over ill-defined directions.
LyapunovEstimate lyapunov_furstenberg(const CocycleSpec& spec, const ExpandingMap& map, int64_t n_steps,
                                      int n_samples, std::uint64_t seed, EstimatorOptions opts = {});

inline constexpr int kCertificationGrid = 4096;

struct BunchingResult {
  bool bunched = false;
  double margin = 0.0;     // 1 - (grid_max + grid_error)
  double grid_max = 0.0;   // max over the grid of |A||A^-1| sigma^-theta
  double grid_error = 0.0; // Lipschitz bound on what the grid can miss
  double theta = 1.0;
};

BunchingResult u_bunching_check(const CocycleSpec& spec, const ExpandingMap& map, double theta);

struct SupDistance {
  double grid_max = 0.0;
  double upper_bound = 0.0;  // grid_max plus the Lipschitz grid error
};

/// sup_x ||A(x) - B(x)|| on the certification grid.
SupDistance sup_distance(const CocycleSpec& a, const CocycleSpec& b, int grid = kCertificationGrid);

/// Seeded trigonometric polynomial of degree <= 8 with sum of |amp| equal to 1.
std::vector<TwistTerm> random_unit_twist(std::uint64_t seed);

/// B(x) = A(x) R(eps * h(x)) with h = random_unit_twist(seed).
CocycleSpec perturb(const CocycleSpec& spec, double epsilon, std::uint64_t seed);
/// B(x) = A(x) R(scale * h(x)) for a given polynomial h.
CocycleSpec add_twist(const CocycleSpec& spec, const std::vector<TwistTerm>& h, double scale);

/// R A R^-1 for the rotation R by `radians`.
CocycleSpec conjugate(const CocycleSpec& spec, double radians);

// ---------------------------------------------------------------------------

template <typename Orbit>
ProjPoint stable_direction_along(const CocycleSpec& spec, Orbit& orbit, int n, double min_gap) {
  const ScaledProduct p = forward_product(spec, orbit, n);
  const double log_gap = 2.0 * p.log_norm();  // s_max / s_min = s_max^2 in SL(2)
  if (!(log_gap >= std::log(min_gap))) {
    fail(ErrorKind::no_hyperbolicity, "singular value gap " + std::to_string(std::exp(log_gap)) +
                                          " below " + std::to_string(min_gap) + " after " +
                                          std::to_string(n) + " steps");
  }
  return svd_general(p.unit).v_dir.perp();
}

}  // namespace sl2lab
