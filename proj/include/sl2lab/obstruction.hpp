#pragma once

// Topological obstructions to continuous invariant sections over x -> kx.
//
// A continuous invariant section xi: S^1 -> PR^2 of A satisfies
// xi(kx) = A(x) xi(x). Taking degrees (winding in PR^2, where a half turn is
// one loop) gives k deg(xi) = deg(xi) + d_A, with d_A the twist degree of
// x -> A(x)v. Sections valued in unordered pairs reduce to the single case on
// the double cover z -> 2z, which doubles the twist: k deg = deg + 2 d_A.

#include <cstdint>
#include <vector>

#include "sl2lab/circle.hpp"
#include "sl2lab/cocycle.hpp"
#include "sl2lab/sl2.hpp"

namespace sl2lab {

/// Samples of a loop S^1 -> PR^2 at the points j/N, stored as angles in [0, pi).
class ProjectiveLoop {
 public:
  ProjectiveLoop() = default;
  /// N must be a power of two >= 2.
  explicit ProjectiveLoop(std::vector<double> angles);

  template <typename Fn>
  static ProjectiveLoop sample(int n, Fn&& direction_at) {
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) angles[j] = direction_at(static_cast<double>(j) / n).angle();
    return ProjectiveLoop(std::move(angles));
  }

  int size() const { return static_cast<int>(angles_.size()); }
  const std::vector<double>& angles() const { return angles_; }
  ProjPoint at(int j) const { return ProjPoint(angles_[j]); }
  /// Piecewise-linear interpolation along the shorter arc between grid samples.
  ProjPoint interpolate(double x) const;
  /// Largest projective step between consecutive samples (including the closing step).
  double max_step() const;
  /// True when every step is below pi/4, the unwrapping guard.
  bool resolved() const;

 private:
  std::vector<double> angles_;
};

/// Degree of the loop in PR^2 (lift increase divided by pi). Throws
/// resolution when a step reaches pi/4; the caller should double N.
int winding_number(const ProjectiveLoop& loop);

/// Winding of x -> A(x) e1, cross-checked against e2; doubles the grid on
/// resolution failures.
int twist_degree(const CocycleSpec& spec, int grid = kCertificationGrid);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  bool is_integer() const { return den == 1; }
  bool operator==(const Rational&) const = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

struct ObstructionReport {
  int k = 2;
  int twist_degree = 0;
  bool single_section_solvable = false;
  Rational single_degree;  // d / (k - 1)
  bool pair_section_solvable = false;
  Rational pair_degree;  // 2d / (k - 1)
  bool obstructed = false;
};

ObstructionReport degree_obstruction(int k, int d);

/// max over y in the grid of the projective spread of {xi(y)} together with
/// {A(x) xi(x) : f(x) = y}; zero exactly for grid-invariant sections.
double section_residual(const CocycleSpec& spec, const ExpandingMap& map, const ProjectiveLoop& loop);

struct SectionSearchResult {
  ProjectiveLoop best_loop;
  double residual = 0.0;        // residual of best_loop
  double final_residual = 0.0;  // residual after the last iteration
  std::vector<double> residual_trace;  // seed loop first, then one entry per iteration
  bool seeded_from_oseledets = true;
};

/// Seeds xi with stable directions at points within k^-window of each grid
/// point (random deeper digits from `seed`), then repeatedly sets
/// xi(y) <- A(y/k) xi(y/k) and re-measures. A persistent large residual is
/// evidence against a continuous invariant section, not a proof.
SectionSearchResult section_consistency_search(const CocycleSpec& spec, const ExpandingMap& map, int grid_n,
                                               int n_iterations, std::uint64_t seed, int direction_steps = 200);

}  // namespace sl2lab
