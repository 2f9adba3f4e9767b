#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixture.hpp"
#include "toda/corrector.hpp"
#include "toda/diagnostics.hpp"

using namespace toda;
using doctest::Approx;
using std::numbers::pi;
using toda::testing::disk_background;

namespace {

FieldPair constant_pair(double a, double b) {
  auto g = disk_background().op.grid_ptr();
  return {ScalarField(g, Eigen::VectorXd::Constant(g->size(), a)),
          ScalarField(g, Eigen::VectorXd::Constant(g->size(), b))};
}

const SolveReport& solved(double lambda) {
  static const SolveReport a = newton_correct(assemble_ansatz(disk_background(), 1e-1));
  static const SolveReport b = newton_correct(assemble_ansatz(disk_background(), 1e-3));
  return lambda == 1e-1 ? a : b;
}

}  // namespace

TEST_CASE("change of variables on constant pairs") {
  const FieldPair d = change_of_variables(constant_pair(1.0, 1.0));
  CHECK(d.first[0] == Approx(1.0));
  CHECK(d.second[0] == Approx(1.0));
  const FieldPair v = change_of_variables(constant_pair(2.0, -1.0));
  CHECK(v.first[0] == Approx(1.0));
  CHECK(std::abs(v.second[0]) < 1e-15);
}

TEST_CASE("change of variables round trip") {
  FieldPair u = constant_pair(0.0, 0.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (Index i = 0; i < u.first.size(); ++i) u.first.values[i] = n(rng), u.second.values[i] = n(rng);
  const FieldPair back = inverse_change_of_variables(change_of_variables(u));
  CHECK((back.first.values - u.first.values).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((back.second.values - u.second.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ball indicator integrates to the disk area") {
  const Grid& g = disk_background().op.grid();
  for (double r : {0.1, 0.3, 0.5}) CHECK(integrate(g, ball_indicator(g, r)) == Approx(pi * r * r).epsilon(0.02));
}

TEST_CASE("local masses approach (4 pi, 8 pi)") {
  const MeanFieldSolution& mf = *disk_background().mf;
  const MassReport far = local_masses(solved(1e-1), mf, {0.1, 0.3, 0.5});
  const MassReport near = local_masses(solved(1e-3), mf, {0.1, 0.3, 0.5});
  CHECK(near.sigma2[1] == Approx(8 * pi).epsilon(0.1));
  CHECK(near.sigma1[1] == Approx(near.sigma1_predicted[1]).epsilon(0.1));
  CHECK(near.rho2_deviation < 0.05);
  CHECK(near.rho2_deviation < far.rho2_deviation);
  for (const MassReport* m : {&far, &near}) {
    CHECK(m->sigma1[0] <= m->sigma1[1]);
    CHECK(m->sigma1[1] <= m->sigma1[2]);
    CHECK(m->sigma2[0] <= m->sigma2[1]);
    CHECK(m->sigma2[1] <= m->sigma2[2]);
  }
  CHECK_THROWS(local_masses(solved(1e-3), mf, {1.5}));
}

TEST_CASE("profiles approach the limiting shapes") {
  const ProfileReport far = profile_check(solved(1e-1), assemble_ansatz(disk_background(), 1e-1));
  const ProfileReport near = profile_check(solved(1e-3), assemble_ansatz(disk_background(), 1e-3));
  CHECK(near.deviation1 < far.deviation1);
  CHECK(near.deviation2 < far.deviation2);
  const double e1 = std::log(far.delta1_fit / near.delta1_fit) / std::log(100.0);
  const double e2 = std::log(far.delta2_fit / near.delta2_fit) / std::log(100.0);
  CHECK(e1 == Approx(0.5).epsilon(0.1));
  CHECK(e2 == Approx(0.25).epsilon(0.2));
}
