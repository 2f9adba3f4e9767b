#include <cmath>

#include "doctest.h"
#include "toda/error.hpp"
#include "toda/fit.hpp"

using namespace toda;
using doctest::Approx;

TEST_CASE("exact line") {
  const LinearFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r_squared == Approx(1.0));
  CHECK(f.max_abs_residual < 1e-12);
  CHECK(f.data_range == Approx(6.0));
  CHECK(f.n == 4);
}

TEST_CASE("power law recovers the exponent") {
  std::vector<double> x, y;
  for (int i = 0; i < 8; ++i) {
    x.push_back(std::pow(10.0, -1 - 2.0 * i / 7));
    y.push_back(3.0 * std::pow(x.back(), 0.25));
  }
  const LinearFit f = fit_power_law(x, y);
  CHECK(f.slope == Approx(0.25).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("confidence interval brackets the slope of noisy data") {
  const LinearFit f = fit_line({0, 1, 2, 3, 4, 5}, {0.1, 0.9, 2.1, 2.9, 4.2, 4.9});
  CHECK(f.slope_ci_low < f.slope);
  CHECK(f.slope < f.slope_ci_high);
  CHECK(f.slope_ci_low < 1.0);
  CHECK(1.0 < f.slope_ci_high);
}

TEST_CASE("degenerate input is rejected") {
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), ArgumentError);
  CHECK_THROWS_AS(fit_line({1, 2}, {1}), ArgumentError);
  CHECK_THROWS_AS(fit_power_law({1, -2, 3}, {1, 2, 3}), ArgumentError);
}
