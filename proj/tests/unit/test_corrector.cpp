#include <cmath>
#include <random>

#include "doctest.h"
#include "fixture.hpp"
#include "toda/ansatz.hpp"
#include "toda/corrector.hpp"
#include "toda/error.hpp"

using namespace toda;
using doctest::Approx;
using toda::testing::disk_background;
using toda::testing::kRho;

namespace {

const SolveReport& solved() {
  static const SolveReport r = newton_correct(assemble_ansatz(disk_background(), 1e-2));
  return r;
}

}  // namespace

TEST_CASE("residual at the ansatz is -R") {
  const AnsatzBundle b = assemble_ansatz(disk_background(), 1e-2);
  const FieldPair f = nonlinear_residual(b.op, b.w1.values, b.w2.values, b.lambda, b.rho);
  const FieldPair r = residual_fields(b);
  const double scale = r.first.values.cwiseAbs().maxCoeff();
  CHECK((f.first.values + r.first.values).cwiseAbs().maxCoeff() < 1e-12 * scale);
  CHECK((f.second.values + r.second.values).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("2 F1 + F2 cancels the lambda terms") {
  const SparseOperator& op = disk_background().op;
  const Grid& g = op.grid();
  const Index ni = g.interior_count();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd u1 = Eigen::VectorXd::Zero(g.size()), u2 = u1;
  for (Index i = 0; i < ni; ++i) u1[i] = u(rng), u2[i] = u(rng);
  const FieldPair f = nonlinear_residual(op, u1, u2, 0.3, kRho);
  const ExpTerms t = exp_terms(g, u1, u2, 0.3);
  const Eigen::VectorXd expected = op.laplacian(2 * u1 + u2) + 3 * kRho * t.g1.head(ni);
  const Eigen::VectorXd got = 2 * f.first.values.head(ni) + f.second.values.head(ni);
  CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-10 * expected.cwiseAbs().maxCoeff());

  const FieldPair f0 = nonlinear_residual(op, u1, u2, 0.0, kRho);
  const Eigen::VectorXd reduced = op.laplacian(u2) - kRho * t.g1.head(ni);
  CHECK((f0.second.values.head(ni) - reduced).cwiseAbs().maxCoeff() < 1e-10 * reduced.cwiseAbs().maxCoeff());
}

TEST_CASE("correction at lambda = 1e-2 stays below the bound") {
  const SolveReport& r = solved();
  CHECK(r.converged);
  CHECK(r.bound == Approx(std::pow(1e-2, 0.2)).epsilon(1e-12));
  CHECK(r.phi_norm < r.bound);
  CHECK(r.residual <= r.tolerance);
  CHECK(r.phi.first.boundary().cwiseAbs().maxCoeff() == 0.0);
  const Grid& grid = *r.phi.first.grid;
  CHECK((symmetrize(grid, r.phi.second.values, 4) - r.phi.second.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Newton tail is superlinear") {
  const std::vector<NewtonStep>& t = solved().trace;
  REQUIRE(t.size() >= 3);
  const std::size_t n = t.size();
  for (std::size_t i = n - 2; i < n; ++i) {
    const double prev = t[i - 1].increment, cur = t[i].increment;
    if (prev < 1e-1 && cur > 1e-13) CHECK(cur <= 10.0 * std::pow(prev, 1.5));
  }
}

TEST_CASE("restarting from the converged correction takes no steps") {
  const SolveReport again = newton_correct(assemble_ansatz(disk_background(), 1e-2), {}, &solved().phi);
  CHECK(again.iterations == 0);
  CHECK(again.converged);
}

TEST_CASE("sweep rejects unordered schedules and fits the decay") {
  CHECK_THROWS_AS(sweep(disk_background(), {1e-2, 1e-1, 1e-3}), ArgumentError);
  const SweepReport s = sweep(disk_background(), {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
  CHECK_FALSE(s.truncated);
  REQUIRE(s.fit.has_value());
  CHECK(s.fit->slope >= 0.20);
  CHECK(s.slope_ok);
  for (std::size_t i = 1; i < s.reports.size(); ++i) CHECK(s.reports[i].phi_norm < 1.1 * s.reports[i - 1].phi_norm);
}

TEST_CASE("epsilon outside (0, 1/4) is rejected") {
  CorrectorOptions o;
  o.epsilon = 0.3;
  CHECK_THROWS_AS(newton_correct(assemble_ansatz(disk_background(), 1e-2), o), ArgumentError);
}
