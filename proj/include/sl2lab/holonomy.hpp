#pragma once

// Unstable holonomies of the lifted cocycle A^ = A o pi over the natural
// extension, from the limit
//
//   h_{x,y} = lim_n A^n(f^-n y) A^n(f^-n x)^-1,   y in W^u_loc(x).
//
// The partial products are accumulated as increments
//
//   H_n - H_{n-1} = H_{n-1} C_{n-1} D_n C_{n-1}^-1,
//   C_n = A(x_-1) ... A(x_-n),  D_n = A(y_-n) A(x_-n)^-1 - I,
//
// where D_n = A0 (R(g(y_-n) - g(x_-n)) - I) A0^-1 is formed from the exact
// backward offset (y_0 - x_0) k^-n rather than by subtracting nearby matrices.
// Forming the two long products and multiplying them would cancel about
// 2 lambda n / ln 10 digits; the increment form keeps relative accuracy.

#include <vector>

#include "sl2lab/circle.hpp"
#include "sl2lab/cocycle.hpp"
#include "sl2lab/sl2.hpp"

namespace sl2lab {

struct HolonomyResult {
  Matrix2 h = Matrix2::identity();
  int depth_used = 0;
  /// Operator-norm distance between the last two partial products.
  double cauchy_residual = 0.0;
  bool converged = false;
  /// residual_trace[n-1] = ||H_n - H_{n-1}||.
  std::vector<double> residual_trace;
};

/// Stops once two consecutive Cauchy residuals are <= tol. Reports
/// converged = false when max_depth is reached first; never extrapolates.
/// Throws not_same_unstable_leaf unless d(x_-n, y_-n) < rho for all n <= max_depth.
HolonomyResult u_holonomy(const CocycleSpec& spec, const ExpandingMap& map, const BackwardItinerary& x_it,
                          const BackwardItinerary& y_it, double tol, int max_depth);

/// Stable holonomy between points of one fiber of pi (equal anchors): the
/// identity, since A^ is constant on local stable sets.
Mat2 s_holonomy(const BackwardItinerary& x_it, const BackwardItinerary& y_it);

/// ||A(y_0) h_{x,y} - h_{f^x, f^y} A(x_0)||. Requires a u-bunched spec and
/// convergence of both holonomies; otherwise throws a convergence error.
double holonomy_equivariance_residual(const CocycleSpec& spec, const ExpandingMap& map,
                                      const BackwardItinerary& x_it, const BackwardItinerary& y_it, double tol,
                                      int max_depth);

}  // namespace sl2lab
