#pragma once

// SL(2,R) and projective-line primitives.
//
// Matrix2 is an unconstrained real 2x2 matrix used for intermediate algebra
// (differences, scaled partial products). Mat2 carries the det = 1 invariant:
// every construction and product renormalizes by sqrt(det) and rejects
// det <= 0 or non-finite entries.
//
// Directions in PR^2 are angles modulo pi. Rotations R(t) act by angle 2*pi*t
// when built from a circle coordinate t in R/Z (see rotation_turns).

#include <array>
#include <cmath>
#include <numbers>

namespace sl2lab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
};

struct Matrix2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // row-major [[a, b], [c, d]]

  static constexpr Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Matrix2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  /// Adjugate; equals the inverse when det = 1.
  Matrix2 adj() const { return {d, -b, -c, a}; }
  Matrix2 transpose() const { return {a, c, b, d}; }
  bool finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
  }
  double max_abs() const;

  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Matrix2 operator*(const Matrix2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  Matrix2 operator+(const Matrix2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
  Matrix2 operator-(const Matrix2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
  Matrix2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

  bool operator==(const Matrix2&) const = default;
};

/// Spectral (operator 2-) norm of an arbitrary 2x2 matrix, closed form.
double op_norm(const Matrix2& m);

/// Element of SL(2,R).
class Mat2 {
 public:
  Mat2() = default;  // identity
  Mat2(double a, double b, double c, double d);
  explicit Mat2(const Matrix2& m);

  static Mat2 identity() { return {}; }
  static Mat2 diag(double s);  // diag(s, 1/s)
  /// Rotation by `radians`.
  static Mat2 rotation(double radians);
  /// Rotation by 2*pi*turns, the R_x of a circle coordinate x.
  static Mat2 rotation_turns(double turns) { return rotation(kTwoPi * turns); }

  const Matrix2& raw() const { return m_; }
  double a() const { return m_.a; }
  double b() const { return m_.b; }
  double c() const { return m_.c; }
  double d() const { return m_.d; }
  double det() const { return m_.det(); }
  double trace() const { return m_.trace(); }
  Mat2 inverse() const;
  double norm() const;

  Vec2 operator*(const Vec2& v) const { return m_ * v; }
  bool operator==(const Mat2&) const = default;

 private:
  friend Mat2 mat_product(const Mat2&, const Mat2&);
  Matrix2 m_;
};

/// m1 * m2, renormalized to det 1 while the norm is small enough for the
/// computed det to mean anything. Throws numeric_overflow on non-finite entries.
Mat2 mat_product(const Mat2& m1, const Mat2& m2);
inline Mat2 operator*(const Mat2& m1, const Mat2& m2) { return mat_product(m1, m2); }

/// A direction in PR^2: the class of +-(cos angle, sin angle), angle in [0, pi).
class ProjPoint {
 public:
  ProjPoint() = default;
  explicit ProjPoint(double angle);
  static ProjPoint from_vector(const Vec2& v);

  double angle() const { return angle_; }
  Vec2 unit() const { return {std::cos(angle_), std::sin(angle_)}; }
  /// The orthogonal direction.
  ProjPoint perp() const { return ProjPoint(angle_ + kPi / 2); }
  bool operator==(const ProjPoint&) const = default;

 private:
  double angle_ = 0.0;
};

/// Reduce an angle into [0, pi).
double normalize_proj_angle(double angle);
/// Reduce an angle difference into [-pi/2, pi/2).
double wrap_proj_delta(double delta);
/// min(|p - q|, pi - |p - q|); a metric on PR^2 bounded by pi/2.
double proj_distance(ProjPoint p, ProjPoint q);

ProjPoint projective_action(const Mat2& m, ProjPoint p);
/// Derivative of the induced circle map at p, equal to 1/|m v|^2 for the unit v in p.
double projective_derivative(const Mat2& m, ProjPoint p);

struct SvdPair {
  double s_max = 1.0;
  double s_min = 1.0;
  ProjPoint u_dir;  // left singular direction for s_max
  ProjPoint v_dir;  // right singular direction for s_max
};

SvdPair svd2(const Mat2& m);
/// Closed-form SVD for any 2x2 matrix; s_min is recovered as |det|/s_max so
/// nearly rank-one inputs keep full relative accuracy.
SvdPair svd_general(const Matrix2& m);

/// |trace| > 2 + tol.
bool is_hyperbolic(const Mat2& m, double tol = 1e-9);

}  // namespace sl2lab
