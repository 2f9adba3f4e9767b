#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "toda/domain.hpp"
#include "toda/elliptic.hpp"
#include "toda/error.hpp"

using namespace toda;
using std::numbers::pi;

namespace {

std::shared_ptr<const Grid> disk_grid(int n_r, int n_theta = 16, double radius = 1.0) {
  return build_grid({Disk{radius}, 4}, PolarResolution{n_r, n_theta, 0.0}, 1.0);
}

double max_interior(const Grid& g, const Eigen::VectorXd& v) {
  return v.head(g.interior_count()).cwiseAbs().maxCoeff();
}

// max error of Delta_h log(d^2 + r^2) against 4 d^2 / (d^2 + r^2)^2
double log_laplacian_error(int n_r) {
  const double d = 0.5;
  auto g = disk_grid(n_r);
  auto op = assemble_laplacian(g);
  Eigen::VectorXd u = sample(*g, [&](Point p) { return std::log(d * d + p.x * p.x + p.y * p.y); });
  Eigen::VectorXd lap = op.laplacian(u);
  double err = 0.0;
  for (Index i = 0; i < g->interior_count(); ++i) {
    const double r2 = std::pow(norm(g->node(i)), 2);
    err = std::max(err, std::abs(lap[i] - 4 * d * d / std::pow(d * d + r2, 2)));
  }
  return err;
}

double bubble_poisson_error(int n_r) {
  const double d = 0.3;
  auto g = disk_grid(n_r);
  auto op = assemble_laplacian(g);
  ScalarField rhs(g, sample(*g, [&](Point p) {
    return 8 * d * d / std::pow(d * d + p.x * p.x + p.y * p.y, 2);
  }));
  ScalarField u = poisson_solve(op, rhs);
  double err = 0.0;
  for (Index i = 0; i < g->size(); ++i) {
    const double r2 = std::pow(norm(g->node(i)), 2);
    err = std::max(err, std::abs(u[i] - 2 * std::log((d * d + 1) / (d * d + r2))));
  }
  return err;
}

}  // namespace

TEST_CASE("Laplacian of 1 - |x|^2 is -4") {
  auto g = disk_grid(64);
  auto op = assemble_laplacian(g);
  Eigen::VectorXd u = sample(*g, [](Point p) { return 1 - p.x * p.x - p.y * p.y; });
  Eigen::VectorXd lap = op.laplacian(u);
  CHECK((lap.array() + 4.0).abs().maxCoeff() < 1e-9);
  CHECK(max_interior(*g, op.laplacian(Eigen::VectorXd::Zero(g->size()))) == 0.0);
}

TEST_CASE("Laplacian converges at second order") {
  const double e1 = log_laplacian_error(64);
  const double e2 = log_laplacian_error(128);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("stiffness is symmetric positive definite") {
  auto g = build_grid({Disk{1.0}, 4}, PolarResolution{40, 16, {}}, 0.01);
  auto op = assemble_laplacian(g);
  const SparseMatrix& k = op.interior_block();
  CHECK((SparseMatrix(k.transpose()) - k).norm() < 1e-10 * k.norm());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(k.rows());
  for (Index i = 0; i < x.size(); ++i) x[i] = nd(rng);
  CHECK(x.dot(k * x) > 0.0);
}

TEST_CASE("Poisson solver oracles") {
  auto g = disk_grid(128);
  auto op = assemble_laplacian(g);
  ScalarField four(g, Eigen::VectorXd::Constant(g->size(), 4.0));
  ScalarField u = poisson_solve(op, four);
  Eigen::VectorXd exact = sample(*g, [](Point p) { return 1 - p.x * p.x - p.y * p.y; });
  CHECK((u.values - exact).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(poisson_solve(op, ScalarField::zeros(g)).values.cwiseAbs().maxCoeff() == 0.0);

  const double e1 = bubble_poisson_error(64);
  const double e2 = bubble_poisson_error(128);
  CHECK(e2 < 1e-3);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("Poisson solve inverts the Laplacian on zero-trace fields") {
  auto g = build_grid({Disk{1.0}, 4}, PolarResolution{48, 16, {}}, 0.02);
  auto op = assemble_laplacian(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(-1, 1);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(g->size());
  for (Index i = 0; i < g->interior_count(); ++i) u[i] = ud(rng);
  Eigen::VectorXd lap = Eigen::VectorXd::Zero(g->size());
  lap.head(g->interior_count()) = -op.laplacian(u);
  ScalarField back = poisson_solve(op, ScalarField(g, lap));
  CHECK((back.values - u).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("harmonic extension") {
  auto g = disk_grid(64, 32);
  auto op = assemble_laplacian(g);
  const Index nb = g->boundary_count();
  ScalarField c = harmonic_extension(op, Eigen::VectorXd::Constant(nb, 2.5));
  CHECK((c.values.array() - 2.5).abs().maxCoeff() < 1e-12);

  Eigen::VectorXd x1(nb);
  for (Index b = 0; b < nb; ++b) x1[b] = g->node(g->interior_count() + b).x;
  ScalarField hx = harmonic_extension(op, x1);
  Eigen::VectorXd exact = sample(*g, [](Point p) { return p.x; });
  CHECK((hx.values - exact).cwiseAbs().maxCoeff() < 1e-3);

  // discrete maximum principle on rough data
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-3, 2);
  Eigen::VectorXd data(nb);
  for (Index b = 0; b < nb; ++b) data[b] = ud(rng);
  ScalarField e = harmonic_extension(op, data);
  CHECK(e.values.maxCoeff() <= data.maxCoeff() + 1e-12);
  CHECK(e.values.minCoeff() >= data.minCoeff() - 1e-12);
}

TEST_CASE("projection P") {
  auto g = disk_grid(64);
  auto op = assemble_laplacian(g);
  ScalarField one(g, Eigen::VectorXd::Ones(g->size()));
  CHECK(project_P(op, one).values.cwiseAbs().maxCoeff() < 1e-12);
  ScalarField bump(g, sample(*g, [](Point p) { return 1 - p.x * p.x - p.y * p.y; }));
  CHECK((project_P(op, bump).values - bump.values).cwiseAbs().maxCoeff() < 1e-9);
  ScalarField f(g, sample(*g, [](Point p) { return std::exp(p.x) + p.y * p.y; }));
  ScalarField pf = project_P(op, f);
  CHECK((project_P(op, pf).values - pf.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Green's regular part") {
  auto g = disk_grid(64);
  auto op = assemble_laplacian(g);
  GreenRegular h = green_regular_part(op, {0.0, 0.0});
  CHECK(h.field.values.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(h.at_pole) < 1e-6);

  auto g3 = disk_grid(64, 16, 3.0);
  GreenRegular h3 = green_regular_part(assemble_laplacian(g3), {0.0, 0.0});
  CHECK(h3.at_pole == doctest::Approx(std::log(3.0) / (2 * pi)).epsilon(1e-10));

  CHECK_THROWS_AS(green_regular_part(op, {1.5, 0.0}), DomainError);

  // off-centre pole on the unit disk: H(y, y) = (1/2pi) log(1 - |y|^2)
  auto gf = build_grid({Disk{1.0}, 4}, PolarResolution{128, 128, 0.0}, 1.0);
  GreenRegular hy = green_regular_part(assemble_laplacian(gf), {0.3, 0.0});
  CHECK(hy.at_pole == doctest::Approx(std::log(1 - 0.09) / (2 * pi)).epsilon(2e-3));
}

TEST_CASE("Green's regular part on the square") {
  // H(0,0) = log(conformal radius)/(2 pi). The Schwarz-Christoffel map of the
  // disk onto the side-2 square gives the radius 8 sqrt(pi) / Gamma(1/4)^2.
  const double rc = 8 * std::sqrt(pi) / std::pow(std::tgamma(0.25), 2);
  const double exact = std::log(rc) / (2 * pi);
  auto h_at = [](double h) {
    auto g = build_grid({Square{2.0}, 4}, CartesianResolution{h}, 0.5);
    return green_regular_part(assemble_laplacian(g), {0.0, 0.0}).at_pole;
  };
  const double a = h_at(1.0 / 32);
  const double b = h_at(1.0 / 64);
  const double richardson = (4 * b - a) / 3;
  CHECK(std::abs(richardson - exact) < 1e-4);
  CHECK(std::abs(b - exact) < 2e-5);
  CHECK(std::abs(richardson - b) < 1e-4);
}

TEST_CASE("norms") {
  auto g = disk_grid(128);
  auto op = assemble_laplacian(g);
  ScalarField one(g, Eigen::VectorXd::Ones(g->size()));
  CHECK(lp_norm(*g, one.values, 1.0) == doctest::Approx(pi).epsilon(1e-10));
  CHECK(lp_norm(*g, one.values, 2.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-10));
  ScalarField bump(g, sample(*g, [](Point p) { return 1 - p.x * p.x - p.y * p.y; }));
  CHECK(norms(op, bump, 2.0).h10 * norms(op, bump, 2.0).h10 ==
        doctest::Approx(2 * pi).epsilon(1e-3));
  Norms z = norms(op, ScalarField::zeros(g), 1.0);
  CHECK(z.lp == 0.0);
  CHECK(z.h10 == 0.0);
  CHECK_THROWS_AS(lp_norm(*g, one.values, 0.5), ArgumentError);
}

TEST_CASE("origin value and interpolation") {
  auto g = build_grid({Disk{1.0}, 4}, PolarResolution{64, 32, {}}, 0.01);
  Eigen::VectorXd f = sample(*g, [](Point p) { return std::cos(p.x) * std::exp(p.y); });
  CHECK(origin_value(*g, f) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(interpolate(*g, f, {0.3, 0.2}) ==
        doctest::Approx(std::cos(0.3) * std::exp(0.2)).epsilon(2e-3));
}
