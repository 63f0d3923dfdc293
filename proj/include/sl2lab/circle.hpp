#pragma once

// Base dynamics: f(x) = kx mod 1 on the circle R/Z, its inverse branches,
// periodic points in exact rational form, and finite-depth points of the
// natural extension written as backward itineraries.

#include <cstdint>
#include <span>
#include <vector>

#include "sl2lab/rng.hpp"

namespace sl2lab {

/// Circle distance on R/Z, in [0, 1/2].
double circle_distance(double x, double y);
/// Reduce into [0, 1).
double wrap_unit(double x);
/// Signed representative of y - x in [-1/2, 1/2).
double circle_delta(double x, double y);

class ExpandingMap {
 public:
  explicit ExpandingMap(int k);

  int k() const { return k_; }
  /// Expansion constant.
  double sigma() const { return static_cast<double>(k_); }
  /// Local injectivity radius, 1/(2k).
  double rho() const { return 0.5 / k_; }

  /// kx mod 1.
  double apply(double x) const;
  /// (y + digit)/k; throws domain for digit outside [0, k).
  double inverse_branch(double y, int digit) const;

 private:
  int k_;
};

inline double apply_map(const ExpandingMap& map, double x) { return map.apply(x); }
inline double inverse_branch(const ExpandingMap& map, double y, int digit) {
  return map.inverse_branch(y, digit);
}

/// A point of the natural extension to finite depth: anchor x0 = x_0 and
/// digits d_1..d_N with x_{-n} = (x_{-n+1} + d_n)/k.
class BackwardItinerary {
 public:
  BackwardItinerary(int k, double x0, std::vector<int> digits = {});

  int k() const { return k_; }
  double anchor() const { return x0_; }
  const std::vector<int>& digits() const { return digits_; }
  int depth() const { return static_cast<int>(digits_.size()); }

  /// x_{-n} for 0 <= n <= depth().
  double point(int n) const;
  /// x_0, x_{-1}, ..., x_{-depth}.
  std::vector<double> backward_orbit() const;

  /// Drops the anchor: the itinerary of f^-1(x^) (anchor x_{-1}, digits d_2..).
  BackwardItinerary shifted_back() const;
  /// The itinerary of f(x^): anchor f(x0), with the consumed digit prepended.
  BackwardItinerary shifted_forward() const;

  bool operator==(const BackwardItinerary&) const = default;

 private:
  int k_;
  double x0_;
  std::vector<int> digits_;
};

BackwardItinerary extend_itinerary(const BackwardItinerary& it, std::span<const int> extra_digits);

/// The point y^ on the local unstable set of x^ whose anchor is x0 + offset
/// (mod 1). Digits are unchanged unless the anchor crosses 0, in which case
/// the base-k carry (or borrow) is propagated so y_{-n} stays within
/// |offset| k^-n of x_{-n}. Throws domain when |offset| >= rho.
BackwardItinerary sample_unstable_neighbor(const BackwardItinerary& it, double offset);

/// True when d(x_{-n}, y_{-n}) < rho for every 0 <= n <= depth.
bool on_local_unstable_set(const BackwardItinerary& x, const BackwardItinerary& y, int depth);

BackwardItinerary random_itinerary(int k, int depth, Rng& rng);

/// x = numerator / denominator with denominator = k^period - 1.
struct PeriodicPoint {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  int period = 1;

  double x() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  /// f^j(x), computed exactly as (k^j * numerator mod denominator) / denominator.
  std::uint64_t orbit_numerator(int k, int j) const;
};

/// k^n - 1, throwing range error on overflow.
std::uint64_t periodic_denominator(int k, int n);
/// Smallest m >= 1 with f^m(j/D) = j/D, where D = k^n - 1.
int minimal_period(int k, std::uint64_t numerator, int n);

/// Every point of minimal period n <= max_period, each listed once.
std::vector<PeriodicPoint> periodic_points(const ExpandingMap& map, int max_period);
/// One representative (smallest numerator) per periodic orbit.
std::vector<PeriodicPoint> periodic_orbits(const ExpandingMap& map, int max_period);

/// Forward orbit of a Lebesgue-random point. The point is a base-k expansion
/// whose digits are drawn lazily: a window of the leading `window()` digits is
/// kept as an integer and each step shifts one digit out and a fresh uniform
/// digit in. kx mod 1 evaluated in floating point would lose log2(k) bits per
/// step and collapse onto 0 after ~53/log2(k) steps; this orbit does not.
class DigitStreamOrbit {
 public:
  DigitStreamOrbit(int k, Rng& rng);
  /// Starts within k^-window of x; later digits are random.
  DigitStreamOrbit(int k, double x, Rng& rng);

  double current() const { return x_; }
  void advance();
  int window() const { return window_; }

 private:
  void refresh();

  int k_;
  int window_;
  std::uint64_t scale_;       // k^window
  std::uint64_t head_scale_;  // k^(window-1)
  std::uint64_t digits_ = 0;
  double x_ = 0.0;
  Rng* rng_;
};

/// Forward orbit of a concrete double, using kx mod 1 at every step.
class MapOrbit {
 public:
  MapOrbit(const ExpandingMap& map, double x) : map_(map), x_(x) {}
  double current() const { return x_; }
  void advance() { x_ = map_.apply(x_); }

 private:
  ExpandingMap map_;
  double x_;
};

}  // namespace sl2lab
