#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixture.hpp"
#include "toda/ansatz.hpp"
#include "toda/error.hpp"

using namespace toda;
using doctest::Approx;
using toda::testing::disk_background;

TEST_CASE("scales from the closed-form disk data") {
  const double z0 = 2 * std::log(2.0), mass = 2 * std::numbers::pi;
  const Deltas a = compute_deltas(1e-4, testing::kRho, z0, mass, 0.0);
  CHECK(a.delta1 == Approx(std::sqrt(2e-4) / 8).epsilon(1e-12));
  CHECK(a.delta2 == Approx(std::pow(2.0, -1.25) * 0.1).epsilon(1e-12));
  const Deltas b = compute_deltas(1e-2, testing::kRho, z0, mass, 0.0);
  CHECK(b.delta1 == Approx(1.7677669529664e-2).epsilon(1e-12));
  CHECK(b.delta2 == Approx(std::pow(2.0, -1.25) * std::pow(1e-2, 0.25)).epsilon(1e-12));
  CHECK(b.delta2 == Approx(0.1329).epsilon(1e-3));
  const Deltas c = compute_deltas(16e-2, testing::kRho, z0, mass, 0.0);
  CHECK(c.delta1 / b.delta1 == Approx(4.0).epsilon(1e-14));
  CHECK(c.delta2 / b.delta2 == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("ansatz assembly identities") {
  const AnsatzBundle b = assemble_ansatz(disk_background(), 1e-2);
  CHECK(b.w1.boundary().cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.w2.boundary().cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd lhs = b.w1.values + b.w2.values;
  const Eigen::VectorXd rhs = 0.5 * (b.pw1.values + b.pw2.values) + 0.5 * b.mf->z.values;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  // value at the origin from the projection expansion with H = 0
  const double predicted = -2 * std::log(b.delta1 * b.delta1) + std::log(std::pow(b.delta2, 4)) + b.mf->z_at_origin;
  CHECK(origin_value(b.op.grid(), b.w1.values) == Approx(predicted).epsilon(0.01));
}

TEST_CASE("residuals decrease along the schedule") {
  double prev = INFINITY;
  for (double lambda : {1e-1, 3e-2, 1e-2, 3e-3}) {
    const ResidualReport r = residual(assemble_ansatz(disk_background(), lambda), {1.0, 2.0});
    const double total = r.r1_norm[0] + r.r2_norm[0];
    CHECK(total < prev);
    prev = total;
    // p = 2: predicted exponents are 0, the norms stay bounded
    CHECK(r.e1_norm[1] < 50.0);
    CHECK(r.e2_norm[1] < 50.0);
  }
}

TEST_CASE("unresolved lambda reports the smallest admissible value") {
  try {
    assemble_ansatz(disk_background(), 1e-12);
    FAIL("expected ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(e.min_admissible_lambda() > 1e-12);
    CHECK_NOTHROW(assemble_ansatz(disk_background(), 1.01 * e.min_admissible_lambda()));
  }
}
