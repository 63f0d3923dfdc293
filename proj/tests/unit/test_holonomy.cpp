#include <catch_amalgamated.hpp>

#include <cmath>

#include "sl2lab/errors.hpp"
#include "sl2lab/holonomy.hpp"

using namespace sl2lab;
using Catch::Approx;

namespace {

const CocycleSpec kExample = CocycleSpec::full_twist(Mat2::diag(2.0));

// H_n straight from the definition, for depths small enough that the two
// products do not cancel away the answer.
Matrix2 naive_partial(const CocycleSpec& spec, const BackwardItinerary& x, const BackwardItinerary& y, int n) {
  // A^n(x_-n) = A(x_-1) A(x_-2) ... A(x_-n)
  Mat2 ay, ax;
  for (int i = 1; i <= n; ++i) {
    ay = ay * spec.evaluate(y.point(i));
    ax = ax * spec.evaluate(x.point(i));
  }
  return (ay * ax.inverse()).raw();
}

}  // namespace

TEST_CASE("self holonomy is exactly the identity", "[holonomy]") {
  const ExpandingMap map(8);
  Rng rng(1);
  const auto x = random_itinerary(8, 60, rng);
  const auto r = u_holonomy(kExample, map, x, x, 1e-8, 60);
  CHECK(r.h == Matrix2::identity());
  CHECK(r.depth_used == 0);
  CHECK(r.converged);
  CHECK(holonomy_equivariance_residual(kExample, map, x, x, 1e-8, 60) <= 1e-12);
}

TEST_CASE("increment form agrees with direct partial products", "[holonomy]") {
  const ExpandingMap map(8);
  Rng rng(2);
  const auto x = random_itinerary(8, 8, rng);
  const auto y = sample_unstable_neighbor(x, 0.01);
  const auto r = u_holonomy(kExample, map, x, y, 1e-300, 8);
  CHECK_FALSE(r.converged);
  CHECK(r.depth_used == 8);
  const Matrix2 naive = naive_partial(kExample, x, y, 8);
  CHECK(op_norm(r.h - naive) <= 1e-9);
}

TEST_CASE("bunched example: convergence, geometric decay, det 1", "[holonomy]") {
  const ExpandingMap map(8);
  const double tol = 1e-8;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_itinerary(8, 61, rng);
    const auto y = sample_unstable_neighbor(x, 0.01 * (2 * rng.uniform() - 1));
    const auto r = u_holonomy(kExample, map, x, y, tol, 60);
    REQUIRE(r.converged);
    CHECK(r.cauchy_residual <= tol);
    CHECK(std::abs(r.h.det() - 1.0) <= 1e-8);

    // rate no worse than C (1/2)^n, the bunching ratio
    const auto& tr = r.residual_trace;
    for (std::size_t n = 1; n < tr.size(); ++n) CHECK(tr[n] <= 8.0 * tr[0] * std::pow(0.5, n));

    // non-increasing beyond depth 5, up to one inversion
    int inversions = 0;
    for (std::size_t n = 5; n < tr.size(); ++n) inversions += tr[n] > tr[n - 1];
    CHECK(inversions <= 1);
  }
}

TEST_CASE("composition along a leaf", "[holonomy][property]") {
  const ExpandingMap map(8);
  const double tol = 1e-8;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_itinerary(8, 60, rng);
    const auto y = sample_unstable_neighbor(x, 0.02 * (2 * rng.uniform() - 1));
    const auto z = sample_unstable_neighbor(x, 0.02 * (2 * rng.uniform() - 1));
    const auto hxy = u_holonomy(kExample, map, x, y, tol, 60);
    const auto hyz = u_holonomy(kExample, map, y, z, tol, 60);
    const auto hxz = u_holonomy(kExample, map, x, z, tol, 60);
    CHECK(op_norm(hyz.h * hxy.h - hxz.h) <= 10 * tol);
  }
}

TEST_CASE("equivariance residual", "[holonomy]") {
  const ExpandingMap map(8);
  const double tol = 1e-8;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_itinerary(8, 61, rng);
    const auto y = sample_unstable_neighbor(x, map.rho() / 8 * (2 * rng.uniform() - 1));
    CHECK(holonomy_equivariance_residual(kExample, map, x, y, tol, 60) <= 10 * tol);
  }
}

TEST_CASE("non-bunched spec reports instead of guessing", "[holonomy]") {
  const ExpandingMap map(2);
  Rng rng(6);
  const auto x = random_itinerary(2, 61, rng);
  const auto y = sample_unstable_neighbor(x, 0.1);
  try {
    holonomy_equivariance_residual(kExample, map, x, y, 1e-8, 60);
    FAIL("residual produced for a non-bunched spec");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::convergence);
  }
  // at a depth cap of 3 nothing has settled to 1e-8
  const auto r = u_holonomy(kExample, map, x, y, 1e-8, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.depth_used == 3);
}

TEST_CASE("holonomy preconditions", "[holonomy]") {
  const ExpandingMap map(8);
  Rng rng(7);
  const auto x = random_itinerary(8, 20, rng);
  const auto y = sample_unstable_neighbor(x, 0.01);
  try {
    u_holonomy(kExample, map, x, y, 1e-8, 60);
    FAIL("shallow itinerary accepted");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::depth);
  }
  std::vector<int> other = x.digits();
  other[3] = (other[3] + 1) % 8;
  try {
    u_holonomy(kExample, map, x, BackwardItinerary(8, y.anchor(), other), 1e-8, 20);
    FAIL("different leaves accepted");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::not_same_unstable_leaf);
  }
  CHECK_THROWS_AS(u_holonomy(kExample, map, x, y, 0.0, 20), LabError);
}

TEST_CASE("stable holonomy is the identity on a fiber", "[holonomy]") {
  const BackwardItinerary a(8, 0.3, {1, 2, 3}), b(8, 0.3, {7, 0, 5});
  CHECK(s_holonomy(a, b) == Mat2::identity());
  CHECK_THROWS_AS(s_holonomy(a, BackwardItinerary(8, 0.4, {1})), LabError);
}
