#include "sl2lab/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sl2lab/errors.hpp"

namespace sl2lab {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

double circle_delta(double x, double y) {
  double d = wrap_unit(y - x);
  if (d >= 0.5) d -= 1.0;
  return d;
}

double circle_distance(double x, double y) { return std::abs(circle_delta(x, y)); }

ExpandingMap::ExpandingMap(int k) : k_(k) {
  if (k < 2) fail(ErrorKind::domain, "expanding map degree must be >= 2, got " + std::to_string(k));
}

double ExpandingMap::apply(double x) const { return wrap_unit(k_ * x); }

double ExpandingMap::inverse_branch(double y, int digit) const {
  if (digit < 0 || digit >= k_) {
    fail(ErrorKind::domain, "branch digit " + std::to_string(digit) + " outside [0, " + std::to_string(k_) + ")");
  }
  return wrap_unit((y + digit) / k_);
}

namespace {

void check_digits(int k, const std::vector<int>& digits) {
  for (int d : digits) {
    if (d < 0 || d >= k) {
      fail(ErrorKind::domain, "itinerary digit " + std::to_string(d) + " outside [0, " + std::to_string(k) + ")");
    }
  }
}

}  // namespace

BackwardItinerary::BackwardItinerary(int k, double x0, std::vector<int> digits)
    : k_(ExpandingMap(k).k()), x0_(wrap_unit(x0)), digits_(std::move(digits)) {
  check_digits(k_, digits_);
}

double BackwardItinerary::point(int n) const {
  if (n < 0 || n > depth()) {
    fail(ErrorKind::domain, "backward index " + std::to_string(n) + " outside itinerary depth " + std::to_string(depth()));
  }
  double x = x0_;
  for (int i = 0; i < n; ++i) x = wrap_unit((x + digits_[i]) / k_);
  return x;
}

std::vector<double> BackwardItinerary::backward_orbit() const {
  std::vector<double> out;
  out.reserve(digits_.size() + 1);
  double x = x0_;
  out.push_back(x);
  for (int d : digits_) {
    x = wrap_unit((x + d) / k_);
    out.push_back(x);
  }
  return out;
}

BackwardItinerary BackwardItinerary::shifted_back() const {
  if (digits_.empty()) fail(ErrorKind::depth, "cannot shift an itinerary of depth 0 backwards");
  return BackwardItinerary(k_, point(1), std::vector<int>(digits_.begin() + 1, digits_.end()));
}

BackwardItinerary BackwardItinerary::shifted_forward() const {
  const double scaled = k_ * x0_;
  const int digit = std::clamp(static_cast<int>(std::floor(scaled)), 0, k_ - 1);
  std::vector<int> digits;
  digits.reserve(digits_.size() + 1);
  digits.push_back(digit);
  digits.insert(digits.end(), digits_.begin(), digits_.end());
  return BackwardItinerary(k_, wrap_unit(scaled), std::move(digits));
}

BackwardItinerary extend_itinerary(const BackwardItinerary& it, std::span<const int> extra_digits) {
  std::vector<int> digits = it.digits();
  digits.insert(digits.end(), extra_digits.begin(), extra_digits.end());
  return BackwardItinerary(it.k(), it.anchor(), std::move(digits));
}

BackwardItinerary sample_unstable_neighbor(const BackwardItinerary& it, double offset) {
  const ExpandingMap map(it.k());
  if (!(std::abs(offset) < map.rho())) {
    fail(ErrorKind::domain, "unstable offset " + std::to_string(offset) + " is not below rho = " + std::to_string(map.rho()));
  }
  const double raw = it.anchor() + offset;
  int carry = static_cast<int>(std::floor(raw));
  const double anchor = wrap_unit(raw);
  std::vector<int> digits = it.digits();
  for (int& d : digits) {
    if (carry == 0) break;
    int t = d + carry;
    carry = (t >= it.k()) ? 1 : (t < 0 ? -1 : 0);
    d = t - carry * it.k();
  }
  return BackwardItinerary(it.k(), anchor, std::move(digits));
}

bool on_local_unstable_set(const BackwardItinerary& x, const BackwardItinerary& y, int depth) {
  if (x.k() != y.k() || depth > x.depth() || depth > y.depth()) return false;
  const double rho = ExpandingMap(x.k()).rho();
  const auto xs = x.backward_orbit();
  const auto ys = y.backward_orbit();
  for (int n = 0; n <= depth; ++n) {
    if (!(circle_distance(xs[n], ys[n]) < rho)) return false;
  }
  return true;
}

BackwardItinerary random_itinerary(int k, int depth, Rng& rng) {
  const double x0 = rng.uniform();
  std::vector<int> digits(static_cast<std::size_t>(depth));
  for (int& d : digits) d = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return BackwardItinerary(k, x0, std::move(digits));
}

// ---------------------------------------------------------------------------
// Periodic points

namespace {

// Enumeration beyond this many candidates per period is refused.
constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 22;

__extension__ typedef unsigned __int128 Wide;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<Wide>(a) * b) % m);
}

}  // namespace

std::uint64_t periodic_denominator(int k, int n) {
  if (k < 2 || n < 1) fail(ErrorKind::domain, "periodic denominator needs k >= 2 and n >= 1");
  std::uint64_t p = 1;
  for (int i = 0; i < n; ++i) {
    if (p > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(k)) {
      fail(ErrorKind::range, std::to_string(k) + "^" + std::to_string(n) + " overflows 64-bit integers");
    }
    p *= static_cast<std::uint64_t>(k);
  }
  return p - 1;
}

std::uint64_t PeriodicPoint::orbit_numerator(int k, int j) const {
  std::uint64_t t = numerator;
  for (int i = 0; i < j; ++i) t = mul_mod(t, static_cast<std::uint64_t>(k), denominator);
  return t;
}

int minimal_period(int k, std::uint64_t numerator, int n) {
  const std::uint64_t den = periodic_denominator(k, n);
  std::uint64_t t = numerator % den;
  for (int m = 1; m <= n; ++m) {
    t = mul_mod(t, static_cast<std::uint64_t>(k), den);
    if (t == numerator % den) return m;
  }
  fail(ErrorKind::internal, "j/(k^n - 1) failed to return after n steps");
}

std::vector<PeriodicPoint> periodic_points(const ExpandingMap& map, int max_period) {
  if (max_period < 1) fail(ErrorKind::domain, "max_period must be >= 1");
  std::uint64_t total = 0;
  for (int n = 1; n <= max_period; ++n) {
    total += periodic_denominator(map.k(), n);
    if (total > kMaxEnumeration) {
      fail(ErrorKind::range, "periods up to " + std::to_string(n) + " need over " + std::to_string(kMaxEnumeration) +
                                 " candidate points; enumeration limit exceeded");
    }
  }
  std::vector<PeriodicPoint> out;
  for (int n = 1; n <= max_period; ++n) {
    const std::uint64_t den = periodic_denominator(map.k(), n);
    for (std::uint64_t j = 0; j < den; ++j) {
      if (minimal_period(map.k(), j, n) == n) out.push_back({j, den, n});
    }
  }
  return out;
}

std::vector<PeriodicPoint> periodic_orbits(const ExpandingMap& map, int max_period) {
  std::vector<PeriodicPoint> out;
  for (const auto& p : periodic_points(map, max_period)) {
    bool smallest = true;
    for (int j = 1; j < p.period && smallest; ++j) smallest = p.orbit_numerator(map.k(), j) > p.numerator;
    if (smallest) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lebesgue-random forward orbits

namespace {

struct Window {
  int length = 0;
  std::uint64_t scale = 1;
};

Window digit_window(int k) {
  Window w;
  const auto kk = static_cast<std::uint64_t>(k);
  while (w.scale <= std::numeric_limits<std::uint64_t>::max() / kk) {
    w.scale *= kk;
    ++w.length;
  }
  return w;
}

}  // namespace

DigitStreamOrbit::DigitStreamOrbit(int k, Rng& rng) : k_(ExpandingMap(k).k()), rng_(&rng) {
  const Window w = digit_window(k_);
  window_ = w.length;
  scale_ = w.scale;
  head_scale_ = scale_ / static_cast<std::uint64_t>(k_);
  digits_ = rng_->below(scale_);
  refresh();
}

DigitStreamOrbit::DigitStreamOrbit(int k, double x, Rng& rng) : DigitStreamOrbit(k, rng) {
  const long double scaled = static_cast<long double>(wrap_unit(x)) * static_cast<long double>(scale_);
  digits_ = std::min<std::uint64_t>(static_cast<std::uint64_t>(scaled), scale_ - 1);
  refresh();
}

void DigitStreamOrbit::advance() {
  digits_ = (digits_ % head_scale_) * static_cast<std::uint64_t>(k_) + rng_->below(static_cast<std::uint64_t>(k_));
  refresh();
}

void DigitStreamOrbit::refresh() {
  x_ = static_cast<double>(static_cast<long double>(digits_) / static_cast<long double>(scale_));
  if (x_ >= 1.0) x_ = std::nextafter(1.0, 0.0);
}

}  // namespace sl2lab
