#include <cmath>
#include <numbers>

#include "doctest.h"
#include "toda/domain.hpp"
#include "toda/elliptic.hpp"
#include "toda/error.hpp"
#include "toda/meanfield.hpp"

using namespace toda;
using doctest::Approx;
using std::numbers::pi;

namespace {

SparseOperator uniform_disk(int n_r) {
  return assemble_laplacian(build_grid({Disk{1.0}, 4}, PolarResolution{n_r, 16, 0.0}, 1.0));
}

}  // namespace

TEST_CASE("closed-form disk solutions") {
  const DiskMeanField six(1.0, 6 * pi);
  CHECK(six.z0() == Approx(2 * std::log(2.0)).epsilon(1e-14));
  CHECK(six.mass_integral() == Approx(2 * pi).epsilon(1e-14));
  const DiskMeanField five(1.0, 5 * pi);
  CHECK(five.z0() == Approx(2 * std::log(4.0 / 3.0)).epsilon(1e-14));
  CHECK(five.mass_integral() == Approx(4 * pi / 3).epsilon(1e-14));
  CHECK(six.ball_fraction(1.0) == Approx(1.0));
}

TEST_CASE("discrete solution converges to the closed form") {
  const DiskMeanField exact(1.0, 6 * pi);
  double err[2];
  int i = 0;
  for (int n : {64, 128}) {
    const SparseOperator op = uniform_disk(n);
    const MeanFieldSolution s = solve_meanfield(op, 6 * pi);
    CHECK(s.residual <= s.tolerance);
    double e = 0.0;
    for (Index j = 0; j < op.grid().size(); ++j) e = std::max(e, std::abs(s.z[j] - exact.z(norm(op.grid().node(j)))));
    err[i++] = e;
    CHECK(s.z.boundary().cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(err[1] < 2e-3);
  CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.15));
}

TEST_CASE("rho at the ends of the admissible range") {
  CHECK_THROWS_AS(check_rho(9 * pi), ArgumentError);
  CHECK_THROWS_AS(check_rho(4 * pi), ArgumentError);
  const SparseOperator op = uniform_disk(48);
  const MeanFieldSolution s = solve_meanfield(op, 4 * pi * (1 + 1e-6));
  CHECK(s.z.values.cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("nondegeneracy certificate is grid stable and decreases towards 8 pi") {
  double prev = INFINITY;
  for (double r : {5.0, 6.0, 7.0, 7.5}) {
    const SparseOperator op = uniform_disk(64);
    MeanFieldSolution s = solve_meanfield(op, r * pi);
    const double sv = certify_nondegeneracy(op, s, 4);
    CHECK(sv > 0.0);
    CHECK(sv < prev);
    prev = sv;
  }
  const SparseOperator a = uniform_disk(48), b = uniform_disk(96);
  MeanFieldSolution sa = solve_meanfield(a, 6 * pi), sb = solve_meanfield(b, 6 * pi);
  const double ratio = certify_nondegeneracy(a, sa, 4) / certify_nondegeneracy(b, sb, 4);
  CHECK(ratio >= 0.8);
  CHECK(ratio <= 1.25);
}
