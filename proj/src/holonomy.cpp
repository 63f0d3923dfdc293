#include "sl2lab/holonomy.hpp"

#include <cmath>
#include <string>

#include "sl2lab/errors.hpp"

namespace sl2lab {

namespace {

// A0 (R(turns) - I) A0^-1, with cos t - 1 written as -2 sin^2(t/2).
Matrix2 rotation_defect(const Mat2& base, double turns) {
  const double t = kTwoPi * turns;
  const double half = std::sin(0.5 * t);
  const double cm1 = -2.0 * half * half;
  const double s = std::sin(t);
  const Matrix2 defect{cm1, -s, s, cm1};
  return base.raw() * defect * base.raw().adj();
}

}  // namespace

HolonomyResult u_holonomy(const CocycleSpec& spec, const ExpandingMap& map, const BackwardItinerary& x_it,
                          const BackwardItinerary& y_it, double tol, int max_depth) {
  if (!(tol > 0.0)) fail(ErrorKind::domain, "holonomy tolerance must be positive");
  if (max_depth < 1) fail(ErrorKind::domain, "holonomy max_depth must be >= 1");
  if (x_it.k() != map.k() || y_it.k() != map.k()) fail(ErrorKind::domain, "itinerary degree does not match the map");

  HolonomyResult out;
  if (x_it == y_it) {
    out.converged = true;
    return out;
  }
  if (x_it.depth() < max_depth || y_it.depth() < max_depth) {
    fail(ErrorKind::depth, "itineraries need depth >= max_depth = " + std::to_string(max_depth));
  }
  if (!on_local_unstable_set(x_it, y_it, max_depth)) {
    fail(ErrorKind::not_same_unstable_leaf, "backward orbits separate by rho or more; points are not on one local unstable set");
  }

  const std::vector<double> xs = x_it.backward_orbit();
  double offset = circle_delta(x_it.anchor(), y_it.anchor());
  Matrix2 h = Matrix2::identity();
  ScaledProduct c;  // C_{n-1}
  double previous = INFINITY;

  for (int n = 1; n <= max_depth; ++n) {
    offset /= map.k();
    const Matrix2 defect = rotation_defect(spec.base(), spec.twist_difference(xs[n], offset));
    const Matrix2 core = c.unit * defect * c.unit.adj();
    const double core_norm = op_norm(core);
    Matrix2 increment = Matrix2::zero();
    if (core_norm > 0.0) {
      const double log_mag = std::log(core_norm) + 2.0 * c.log_scale;
      if (log_mag > -745.0) increment = h * (core * (std::exp(log_mag) / core_norm));
    }
    h = h + increment;
    if (!h.finite()) fail(ErrorKind::numeric_overflow, "holonomy partial product overflowed at depth " + std::to_string(n));

    const double residual = op_norm(increment);
    out.residual_trace.push_back(residual);
    out.cauchy_residual = residual;
    out.depth_used = n;
    if (residual <= tol && previous <= tol) {
      out.converged = true;
      break;
    }
    previous = residual;
    c.right_multiply(spec.evaluate_raw(xs[n]));
  }
  out.h = h;
  return out;
}

Mat2 s_holonomy(const BackwardItinerary& x_it, const BackwardItinerary& y_it) {
  if (x_it.k() != y_it.k() || x_it.anchor() != y_it.anchor()) {
    fail(ErrorKind::domain, "stable holonomy needs both points in one fiber (equal anchors)");
  }
  return Mat2::identity();
}

double holonomy_equivariance_residual(const CocycleSpec& spec, const ExpandingMap& map,
                                      const BackwardItinerary& x_it, const BackwardItinerary& y_it, double tol,
                                      int max_depth) {
  const BunchingResult bunching = u_bunching_check(spec, map, spec.theta());
  if (!bunching.bunched) {
    fail(ErrorKind::convergence, "cocycle is not u-bunched (margin " + std::to_string(bunching.margin) +
                                     "); holonomy limits are not guaranteed");
  }
  const HolonomyResult here = u_holonomy(spec, map, x_it, y_it, tol, max_depth);
  const HolonomyResult there = u_holonomy(spec, map, x_it.shifted_forward(), y_it.shifted_forward(), tol, max_depth);
  if (!here.converged || !there.converged) {
    fail(ErrorKind::convergence, "holonomy did not converge within max_depth = " + std::to_string(max_depth));
  }
  const Matrix2 lhs = spec.evaluate_raw(y_it.anchor()) * here.h;
  const Matrix2 rhs = there.h * spec.evaluate_raw(x_it.anchor());
  return op_norm(lhs - rhs);
}

}  // namespace sl2lab
