#include "toda/fit.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "toda/error.hpp"

namespace toda {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ArgumentError("fit_line: non-finite data");
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_line: abscissae are all equal");
  LinearFit f;
  f.n = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  f.data_range = *hi - *lo;
  if (f.n > 2) {
    f.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    f.slope_ci_low = f.slope - t * f.slope_stderr;
    f.slope_ci_high = f.slope + t * f.slope_stderr;
  } else {
    f.slope_ci_low = f.slope_ci_high = f.slope;
  }
  return f;
}

LinearFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("fit_power_law needs positive data");
    lx[i] = std::log(x[i]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) ly[i] = std::log(y[i]);
  return fit_line(lx, ly);
}

}  // namespace toda
