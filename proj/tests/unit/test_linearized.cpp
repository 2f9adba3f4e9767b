#include <cmath>
#include <random>

#include "doctest.h"
#include "fixture.hpp"
#include "toda/error.hpp"
#include "toda/linearized.hpp"

using namespace toda;
using doctest::Approx;
using toda::testing::disk_background;

namespace {

const LinearizedOperator& op_at(double lambda) {
  static const LinearizedOperator a = assemble_linearized(assemble_ansatz(disk_background(), 1e-2));
  static const LinearizedOperator b = assemble_linearized(assemble_ansatz(disk_background(), 1e-3));
  return lambda == 1e-2 ? a : b;
}

ScalarField random_symmetric(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd v(g.size());
  for (Index i = 0; i < v.size(); ++i) v[i] = n(rng);
  v.tail(g.boundary_count()).setZero();
  return {disk_background().op.grid_ptr(), symmetrize(g, v, 4)};
}

double max_abs(const ScalarField& f) { return f.values.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("coupling row: input (0, phi2) gives lambda e^{W2} phi2 in the first component") {
  const LinearizedOperator& L = op_at(1e-2);
  std::mt19937_64 rng(3);
  const ScalarField phi2 = random_symmetric(L.grid(), rng);
  const FieldPair out = L.apply({ScalarField::zeros(phi2.grid), phi2});
  const Index ni = L.grid().interior_count();
  const Eigen::VectorXd expected = L.f2().head(ni).cwiseProduct(phi2.values.head(ni));
  CHECK((out.first.values.head(ni) - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("nonlocal bracket annihilates constants") {
  const LinearizedOperator& L = op_at(1e-2);
  const Grid& grid = L.grid();
  const Index ni = grid.interior_count();
  // g = e^{u1} / int e^{u1} has unit integral, so g c - g int(g c) = 0
  CHECK(integrate(grid, L.g()) == Approx(1.0).epsilon(1e-13));
  // zero-trace test functions only see the interior part of that integral:
  // L1(c, 0) = -Delta_h c - 2 rho c g (1 - m), m the interior mass of g
  const double m = L.laplacian().interior_weights().dot(L.g().head(ni));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(grid.size());
  c.head(ni).setConstant(2.5);
  const ScalarField cf(disk_background().op.grid_ptr(), c);
  const FieldPair out = L.apply({cf, ScalarField::zeros(cf.grid)});
  const Eigen::VectorXd bracket = 2.5 * (1.0 - m) * L.g().head(ni);
  const Eigen::VectorXd row1 = -L.laplacian().laplacian(c) - 2.0 * L.rho() * bracket;
  const Eigen::VectorXd row2 = L.rho() * bracket;
  CHECK((out.first.values.head(ni) - row1).cwiseAbs().maxCoeff() < 1e-10 * row1.cwiseAbs().maxCoeff());
  CHECK((out.second.values.head(ni) - row2).cwiseAbs().maxCoeff() < 1e-10 * row2.cwiseAbs().maxCoeff());
}

TEST_CASE("solve: symmetric, linear, zero for zero data") {
  const LinearizedOperator& L = op_at(1e-2);
  std::mt19937_64 rng(5);
  const FieldPair h{random_symmetric(L.grid(), rng), random_symmetric(L.grid(), rng)};
  const FieldPair phi = L.solve_laplacian_form(h);
  CHECK(L.last_residual() < 1e-9);
  CHECK((symmetrize(L.grid(), phi.first.values, 4) - phi.first.values).cwiseAbs().maxCoeff() < 1e-12 * max_abs(phi.first));
  CHECK(phi.first.boundary().cwiseAbs().maxCoeff() == 0.0);

  const FieldPair scaled = L.solve_laplacian_form({ScalarField(h.first.grid, 3.0 * h.first.values),
                                                   ScalarField(h.second.grid, 3.0 * h.second.values)});
  CHECK((scaled.first.values - 3.0 * phi.first.values).cwiseAbs().maxCoeff() < 1e-10 * max_abs(scaled.first));
  CHECK((scaled.second.values - 3.0 * phi.second.values).cwiseAbs().maxCoeff() < 1e-10 * max_abs(scaled.second));

  const FieldPair zero = L.solve_laplacian_form({ScalarField::zeros(h.first.grid), ScalarField::zeros(h.first.grid)});
  CHECK(max_abs(zero.first) == 0.0);
  CHECK(max_abs(zero.second) == 0.0);

  // L (L^{-1} f) = f
  const FieldPair back = L.apply(L.solve(h));
  const Index ni = L.grid().interior_count();
  CHECK((back.first.values.head(ni) - h.first.values.head(ni)).cwiseAbs().maxCoeff() < 1e-8 * max_abs(h.first));
}

TEST_CASE("inverse bound grows slowly between lambda = 1e-2 and 1e-3") {
  const NormProbe p = norm_probe({op_at(1e-2), op_at(1e-3)}, {10, 8, 7});
  REQUIRE(p.max_ratio.size() == 2);
  CHECK(p.max_ratio[1] >= 0.85 * p.max_ratio[0]);
  // C |log lambda| with C fitted at 1e-2
  CHECK(p.max_ratio[1] / p.max_ratio[0] <= 3.0 * std::log(1e-3) / std::log(1e-2));
}

TEST_CASE("probe is reproducible for a fixed seed") {
  const NormProbe a = norm_probe({op_at(1e-2), op_at(1e-3)}, {3, 4, 11});
  const NormProbe b = norm_probe({op_at(1e-2), op_at(1e-3)}, {3, 4, 11});
  CHECK(a.max_ratio == b.max_ratio);
  CHECK_THROWS_AS(norm_probe({op_at(1e-2)}, {}), ArgumentError);
}
