#include "sl2lab/sl2.hpp"

#include <algorithm>
#include <string>

#include "sl2lab/errors.hpp"

namespace sl2lab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::numeric_overflow: return "numeric_overflow";
    case ErrorKind::domain: return "domain";
    case ErrorKind::range: return "range";
    case ErrorKind::no_hyperbolicity: return "no_hyperbolicity";
    case ErrorKind::not_same_unstable_leaf: return "not_same_unstable_leaf";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::depth: return "depth";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::config: return "config";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

double Matrix2::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

double op_norm(const Matrix2& m) {
  const double e = 0.5 * (m.a + m.d);
  const double f = 0.5 * (m.a - m.d);
  const double g = 0.5 * (m.c + m.b);
  const double h = 0.5 * (m.c - m.b);
  return std::hypot(e, h) + std::hypot(f, g);
}

namespace {

Matrix2 renormalized(const Matrix2& m) {
  if (!m.finite()) {
    fail(ErrorKind::numeric_overflow,
         "non-finite matrix entry; long products must use the scaled representation");
  }
  const double det = m.det();
  if (!(det > 0.0)) {
    fail(ErrorKind::domain, "matrix determinant " + std::to_string(det) + " is not positive");
  }
  if (det == 1.0) return m;
  return m * (1.0 / std::sqrt(det));
}

}  // namespace

Mat2::Mat2(double a, double b, double c, double d) : m_(renormalized({a, b, c, d})) {}
Mat2::Mat2(const Matrix2& m) : m_(renormalized(m)) {}

Mat2 Mat2::diag(double s) { return Mat2(s, 0.0, 0.0, 1.0 / s); }

Mat2 Mat2::rotation(double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return Mat2(c, -s, s, c);
}

Mat2 Mat2::inverse() const {
  Mat2 out;
  out.m_ = m_.adj();
  return out;
}

double Mat2::norm() const { return op_norm(m_); }

Mat2 mat_product(const Mat2& m1, const Mat2& m2) {
  const Matrix2 p = m1.raw() * m2.raw();
  // Past |P|^2 ~ 1e8 the computed det is mostly cancellation error, while the
  // exact det of a product of unimodular factors is 1; renormalizing by it
  // would only inject that error (or reject a valid product as det <= 0).
  const double n = op_norm(p);
  if (std::isfinite(n) && n * n > 1e8) {
    Mat2 out;
    out.m_ = p;
    return out;
  }
  return Mat2(p);
}

double normalize_proj_angle(double angle) {
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;  // fmod rounding at the seam
  return r;
}

double wrap_proj_delta(double delta) {
  double r = std::fmod(delta + kPi / 2, kPi);
  if (r < 0.0) r += kPi;
  return r - kPi / 2;
}

ProjPoint::ProjPoint(double angle) : angle_(normalize_proj_angle(angle)) {}

ProjPoint ProjPoint::from_vector(const Vec2& v) { return ProjPoint(std::atan2(v.y, v.x)); }

double proj_distance(ProjPoint p, ProjPoint q) {
  const double diff = std::abs(p.angle() - q.angle());
  return std::min(diff, kPi - diff);
}

ProjPoint projective_action(const Mat2& m, ProjPoint p) { return ProjPoint::from_vector(m * p.unit()); }

double projective_derivative(const Mat2& m, ProjPoint p) {
  const Vec2 w = m * p.unit();
  return m.det() / (w.x * w.x + w.y * w.y);
}

SvdPair svd_general(const Matrix2& m) {
  SvdPair out;
  const double e = 0.5 * (m.a + m.d);
  const double f = 0.5 * (m.a - m.d);
  const double g = 0.5 * (m.c + m.b);
  const double h = 0.5 * (m.c - m.b);
  out.s_max = std::hypot(e, h) + std::hypot(f, g);
  out.s_min = out.s_max > 0.0 ? std::abs(m.det()) / out.s_max : 0.0;

  // Top eigenvector of m^T m.
  const double p = m.a * m.a + m.c * m.c;
  const double r = m.b * m.b + m.d * m.d;
  const double q = m.a * m.b + m.c * m.d;
  out.v_dir = ProjPoint(0.5 * std::atan2(2.0 * q, p - r));
  const Vec2 image = m * out.v_dir.unit();
  out.u_dir = (image.x == 0.0 && image.y == 0.0) ? out.v_dir : ProjPoint::from_vector(image);
  return out;
}

SvdPair svd2(const Mat2& m) {
  SvdPair out = svd_general(m.raw());
  out.s_min = 1.0 / out.s_max;
  return out;
}

bool is_hyperbolic(const Mat2& m, double tol) { return std::abs(m.trace()) > 2.0 + tol; }

}  // namespace sl2lab
