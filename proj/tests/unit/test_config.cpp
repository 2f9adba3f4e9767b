#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "toda/config.hpp"
#include "toda/error.hpp"

using namespace toda;
using doctest::Approx;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("defaults describe the unit disk at rho = 6 pi") {
  const RunConfig c = parse("");
  CHECK(c.rho() == Approx(6 * std::numbers::pi));
  CHECK(std::holds_alternative<Disk>(c.domain.shape));
  const std::vector<double> l = c.lambdas();
  REQUIRE(l.size() == 8);
  CHECK(l.front() == Approx(0.1));
  CHECK(l.back() == Approx(1e-3));
  for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i] / l[i - 1] == Approx(l[1] / l[0]));
}

TEST_CASE("sections and lists are read") {
  const RunConfig c = parse(
      "# comment\n[domain]\nshape = square\nside = 2\nsymmetry = 4\n[grid]\nkind = cartesian\nh = 0.05\n"
      "[sweep]\np = 1, 2\nradii = 0.2\ncount = 6\n[run]\nseed = 42\n");
  CHECK(std::holds_alternative<Square>(c.domain.shape));
  CHECK(c.grid_kind == GridKind::cartesian);
  CHECK(c.cartesian.h == Approx(0.05));
  CHECK(c.p_grid == std::vector<double>{1.0, 2.0});
  CHECK(c.radii == std::vector<double>{0.2});
  CHECK(c.lambda_count == 6);
  CHECK(c.seed == 42);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(parse("[model]\nrho_over_pi = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nrho_over_pi = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nunknown = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nn_r = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\nlambda_max = 1e-3\nlambda_min = 1e-2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nepsilon = 0.3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[domain]\nsymmetry = 2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("hash follows the canonical form") {
  const RunConfig a = parse("[run]\nseed = 1\nout = here\n");
  const RunConfig b = parse("[run]\nout = elsewhere\nseed = 1\n");
  const RunConfig c = parse("[run]\nseed = 2\n");
  CHECK(canonical_form(a) == canonical_form(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
}
