#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "toda/domain.hpp"
#include "toda/elliptic.hpp"
#include "toda/error.hpp"

using namespace toda;
using std::numbers::pi;

namespace {

DomainSpec unit_disk(int k = 4) { return {Disk{1.0}, k}; }

Eigen::VectorXd polar_sample(const Grid& g, double (*f)(double, double)) {
  Eigen::VectorXd v(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const Point p = g.node(i);
    v[i] = f(norm(p), std::atan2(p.y, p.x));
  }
  return v;
}

}  // namespace

TEST_CASE("disk weights sum to pi") {
  auto g = build_grid(unit_disk(), PolarResolution{64, 128, {}}, 0.05);
  CHECK(g->weights().sum() == doctest::Approx(pi).epsilon(1e-3));
  CHECK(g->min_spacing() <= 0.05 / 4 + 1e-15);
  CHECK(g->rotation_invariant());
  CHECK(g->interior_count() == 63 * 128);
}

TEST_CASE("square weights sum to the area") {
  auto g = build_grid({Square{2.0}, 4}, CartesianResolution{1.0 / 64}, 0.05);
  CHECK(g->weights().sum() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(g->rotation_invariant());
}

TEST_CASE("grid rejections") {
  CHECK_THROWS_AS(build_grid(unit_disk(4), PolarResolution{64, 126, {}}, 0.05), DomainError);
  CHECK_THROWS_AS(build_grid(unit_disk(2), PolarResolution{64, 128, {}}, 0.05), DomainError);
  Polygon shifted{{{0.5, 0.5}, {2.5, 0.5}, {2.5, 2.5}, {0.5, 2.5}}};
  CHECK_THROWS_AS(validate({shifted, 4}), DomainError);
  CHECK_THROWS_AS(validate({Square{2.0}, 3}), DomainError);
}

TEST_CASE("polygon input") {
  std::istringstream in("# regular hexagon\n1 0\n0.5 0.8660254037844386\n-0.5 0.8660254037844386\n"
                        "-1 0\n-0.5 -0.8660254037844386\n0.5 -0.8660254037844386\n");
  Polygon hex = read_polygon(in);
  REQUIRE(hex.vertices.size() == 6);
  CHECK_NOTHROW(validate({hex, 6}));
  CHECK_NOTHROW(validate({hex, 3}));
  CHECK_THROWS_AS(validate({hex, 4}), DomainError);
  CHECK(area({hex, 6}) == doctest::Approx(1.5 * std::sqrt(3.0)));
  auto g = build_grid({hex, 6}, CartesianResolution{1.0 / 40}, 0.1);
  CHECK(g->weights().sum() == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-10));
  CHECK_FALSE(g->rotation_invariant());
  CHECK_THROWS_AS(symmetrize(*g, Eigen::VectorXd::Zero(g->size()), 6), DomainError);
}

TEST_CASE("quadrature moments on the disk") {
  auto g = build_grid(unit_disk(), PolarResolution{128, 64, {}}, 0.02);
  Eigen::VectorXd r2(g->size());
  Eigen::VectorXd gauss(g->size());
  for (Index i = 0; i < g->size(); ++i) {
    const double s = norm(g->node(i));
    r2[i] = s * s;
    gauss[i] = std::exp(-s * s);
  }
  CHECK(integrate(*g, r2) == doctest::Approx(pi / 2).epsilon(1e-3));
  CHECK(integrate(*g, gauss) == doctest::Approx(pi * (1 - std::exp(-1.0))).epsilon(1e-3));
}

TEST_CASE("symmetrize") {
  auto g = build_grid(unit_disk(4), PolarResolution{32, 32, {}}, 0.1);
  Eigen::VectorXd c1 = polar_sample(*g, [](double, double t) { return std::cos(t); });
  CHECK(symmetrize(*g, c1, 4).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::VectorXd radial(g->size());
  for (Index i = 0; i < g->size(); ++i) radial[i] = std::exp(g->polar()->ring_radius[i / 32]);
  CHECK(symmetrize(*g, radial, 4) == radial);
  Eigen::VectorXd c4 = polar_sample(*g, [](double, double t) { return std::cos(4 * t); });
  CHECK((symmetrize(*g, c4, 4) - c4).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Eigen::VectorXd f(g->size());
  Eigen::VectorXd h(g->size());
  for (Index i = 0; i < g->size(); ++i) {
    f[i] = nd(rng);
    h[i] = nd(rng);
  }
  const Eigen::VectorXd sf = symmetrize(*g, f, 4);
  CHECK(symmetrize(*g, sf, 4) == sf);
  const auto rot = g->rotation();
  for (Index i = 0; i < g->size(); ++i) CHECK(sf[rot[static_cast<std::size_t>(i)]] == sf[i]);
  const Eigen::VectorXd sh = symmetrize(*g, h, 4);
  const double inner = (f - sf).cwiseProduct(g->weights()).dot(sh);
  CHECK(std::abs(inner) < 1e-12);
}

TEST_CASE("symmetrize on the square grid") {
  auto g = build_grid({Square{2.0}, 4}, CartesianResolution{0.125}, 0.5);
  Eigen::VectorXd x = sample(*g, [](Point p) { return p.x; });
  CHECK(symmetrize(*g, x, 4).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::VectorXd r2 = sample(*g, [](Point p) { return p.x * p.x + p.y * p.y; });
  CHECK(symmetrize(*g, r2, 4) == r2);
}
