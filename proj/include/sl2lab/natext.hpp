#pragma once

// Smooth realization of the natural extension of f(x) = kx mod 1 as an
// attractor of an injective map
//
//   g : S^1 x D -> S^1 x D,   g(x, v) = (f(x), h(x)/(2N) + lambda v),
//
// with D the open unit ball of R^N and h = (h_1, ..., h_N) a family of smooth
// plateau bumps, h_i = 1 on the chart U_i and 0 outside V_i. Distinct
// preimages of one point are separated by h (|h(x) - h(y)| >= delta), and
// lambda < delta/(4N) makes g injective. A backward orbit x^ is realized as
// the limit iota(x^) of g^n({x_-n} x D), disks of radius lambda^n.
//
// Queries that compare realized points at the lambda^depth scale use
// 50-digit arithmetic internally: lambda^20 is near 1e-35 for k = 8, well
// below the resolution of a double.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <span>
#include <vector>

#include "sl2lab/circle.hpp"

namespace sl2lab {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// Largest slope of the plateau transition profile on [0, 1].
inline constexpr double kPlateauSlopeBound = 2.0;

/// Smooth transition: 1 for s <= 0, 0 for s >= 1, C-infinity in between.
double plateau_profile(double s);
double plateau_profile_derivative(double s);

struct NatExtRealization {
  ExpandingMap map{2};
  int n_charts = 0;
  std::vector<double> centers;
  double inner_radius = 0.0;  // U_i = ball of this radius around centers[i]
  double outer_radius = 0.0;  // V_i
  double delta = 0.0;          // certified separation: grid_min - grid_error
  double delta_grid_min = 0.0;
  double delta_grid_error = 0.0;
  double lambda = 0.0;

  int ambient_dim() const { return 1 + n_charts; }
  double bump(int i, double x) const;
  std::vector<double> h(double x) const;
};

/// N = 2k charts at i/(2k), inner radius 1/(4k), outer radius 3/(8k);
/// lambda = 0.9 delta/(4N).
NatExtRealization build_realization(const ExpandingMap& map);

/// min over the 4096-grid and j = 1..k-1 of |h(x) - h(x + j/k)|.
double separation_grid_min(const NatExtRealization& real, int grid = 4096);

struct NatExtPoint {
  double base = 0.0;
  std::vector<double> fiber;
};

/// g(x, v); throws domain unless |v| < 1.
NatExtPoint apply_g(const NatExtRealization& real, double x, std::span<const double> v);

struct IotaResult {
  NatExtPoint point;
  int depth = 0;
  double radius = 0.0;  // lambda^depth
};

/// g^depth applied to (x_-depth, 0) using the full itinerary depth. Throws
/// DepthError when lambda^depth > tol.
IotaResult iota(const NatExtRealization& real, const BackwardItinerary& it, double tol);

/// Depth needed so that lambda^depth <= tol.
int required_depth(const NatExtRealization& real, double tol);

/// x_0, x_-1, ..., x_-depth in 50-digit arithmetic.
std::vector<HighPrecision> exact_backward_orbit(const BackwardItinerary& it);

struct ExactNatExtPoint {
  HighPrecision base;
  std::vector<HighPrecision> fiber;
};

/// iota at `depth` from orbit[first] (the anchor) through orbit[first + depth].
ExactNatExtPoint iota_exact(const NatExtRealization& real, std::span<const HighPrecision> orbit, int depth,
                            int first = 0);
/// g in 50-digit arithmetic.
ExactNatExtPoint apply_g_exact(const NatExtRealization& real, const ExactNatExtPoint& p);
/// Circle distance on the base plus Euclidean distance on the fiber, combined in quadrature.
HighPrecision natext_distance(const ExactNatExtPoint& p, const ExactNatExtPoint& q);

/// |g(iota(f^-1 x^)) - iota(x^)| with both sides at `depth`; the itinerary
/// must have depth >= depth + 1.
double conjugacy_residual(const NatExtRealization& real, const BackwardItinerary& it, int depth);

}  // namespace sl2lab
