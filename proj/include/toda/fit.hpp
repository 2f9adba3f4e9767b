#pragma once

#include <vector>

namespace toda {

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  double slope_ci_low = 0.0;   ///< 95% Student-t interval
  double slope_ci_high = 0.0;
  double max_abs_residual = 0.0;
  double data_range = 0.0;     ///< max(y) - min(y)
  int n = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log(y) against log(x).
LinearFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace toda
