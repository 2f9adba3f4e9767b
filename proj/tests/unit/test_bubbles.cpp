#include <cmath>
#include <numbers>

#include "doctest.h"
#include "toda/bubbles.hpp"
#include "toda/elliptic.hpp"
#include "toda/error.hpp"

using namespace toda;
using doctest::Approx;
using std::numbers::pi;

TEST_CASE("bubble values at closed-form points") {
  CHECK(bubble_value({2.0, 1.0}, 0.0) == Approx(std::log(8.0)).epsilon(1e-14));
  CHECK(bubble_value({2.0, 1.0}, 1.0) == Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(bubble_value({4.0, 0.5}, 0.0) == Approx(std::log(512.0)).epsilon(1e-14));
  CHECK(bubble_value({2.0, 1.0}, Point{0.6, 0.8}) == Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("bubble mass against the radial closed form") {
  const BubbleMass m = bubble_mass({2.0, 0.1}, 1.0);
  CHECK(m.closed_form == Approx(8 * pi / 1.01).epsilon(1e-14));
  CHECK(m.quadrature == Approx(m.closed_form).epsilon(1e-10));
  CHECK(bubble_mass({2.0, 0.3}, 0.3).quadrature == Approx(4 * pi).epsilon(1e-10));
  CHECK(bubble_mass({4.0, 1e-4}, 1.0).quadrature == Approx(16 * pi).epsilon(1e-10));
}

TEST_CASE("Z vanishes at |x| = delta and is 1 at the origin") {
  for (double alpha : {2.0, 4.0}) {
    const BubbleParams p{alpha, 0.2};
    CHECK(z_function(p, Point{0.0, 0.0}) == Approx(1.0));
    CHECK(std::abs(z_function(p, Point{0.2, 0.0})) < 1e-14);
    CHECK(std::abs(z_function(p, Point{0.0, -0.2})) < 1e-14);
  }
}

TEST_CASE("weighted identities: first vanishes, second is -pi/alpha") {
  for (double alpha : {2.0, 4.0}) {
    const WeightedIdentities w = weighted_identities(alpha);
    CHECK(std::abs(w.values[0]) < 1e-6);
    CHECK(w.values[1] == Approx(-pi / alpha).epsilon(1e-8));
    CHECK(w.values[2] == Approx(w.closed_form[2]).epsilon(1e-8));
    CHECK(w.stated[2] == Approx(-pi / (2 * alpha * alpha)));
  }
}

TEST_CASE("invalid bubble parameters are rejected") {
  CHECK_THROWS_AS(validate(BubbleParams{3.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(validate(BubbleParams{2.0, -1.0}), ArgumentError);
  CHECK_THROWS_AS(bubble_mass({2.0, 1.0}, 0.0), ArgumentError);
}

TEST_CASE("projections have zero trace and respect the resolution guard") {
  auto op = assemble_laplacian(build_grid({Disk{1.0}, 4}, PolarResolution{96, 16, 0.0}, 1.0));
  const BubbleParams p{2.0, 0.1};
  const ScalarField pw = projected_bubble(op, p);
  const ScalarField pz = projected_Z(op, p);
  CHECK(pw.boundary().cwiseAbs().maxCoeff() == 0.0);
  CHECK(pz.boundary().cwiseAbs().maxCoeff() == 0.0);
  // on the disk H = 0, so Pw = -2 log(delta^2 + |x|^2) + O(delta^2)
  CHECK(expansion_deviation(op, p, pw, ScalarField::zeros(op.grid_ptr())) < 0.05);
  CHECK_THROWS_AS(projected_bubble(op, {2.0, 1e-4}), ResolutionError);
}
