#pragma once

#include <vector>

#include "toda/ansatz.hpp"
#include "toda/corrector.hpp"
#include "toda/field.hpp"
#include "toda/fit.hpp"

namespace toda {

/// v1 = (2 u1 + u2) / 3, v2 = (u1 + 2 u2) / 3, so that u1 = 2 v1 - v2 and
/// u2 = 2 v2 - v1.
FieldPair change_of_variables(const FieldPair& u);
FieldPair inverse_change_of_variables(const FieldPair& v);

/// Smoothed indicator of the ball B_r: 1 inside, 0 outside, linear across one
/// mesh width centred on |x| = r.
Eigen::VectorXd ball_indicator(const Grid& grid, double r);

struct MassReport {
  double lambda = 0.0;
  double rho = 0.0;
  std::vector<double> radii;
  std::vector<double> sigma1;            ///< rho int_{B_r} e^{u1} / int e^{u1}
  std::vector<double> sigma2;            ///< lambda int_{B_r} e^{u2}
  std::vector<double> sigma1_predicted;  ///< 4 pi + (rho - 4 pi) int_{B_r} e^z / int e^z
  std::vector<double> sigma1_deviation;  ///< relative to the prediction
  std::vector<double> sigma2_deviation;  ///< relative to 8 pi
  double rho2 = 0.0;                     ///< lambda int e^{u2}
  double rho2_deviation = 0.0;           ///< |rho2 - 8 pi| / 8 pi
};

/// Ball masses of a converged solve. The sigma1 prediction uses the closed-form
/// mean-field solution on disks and the grid solution otherwise. Radii must not
/// exceed the inradius.
MassReport local_masses(const SolveReport& report, const MeanFieldSolution& mf,
                        const std::vector<double>& radii);

struct ProfileReport {
  double lambda = 0.0;
  FieldPair v;
  /// H^1 seminorm of v1 - (-log(delta1^2 + |x|^2) + 4 pi H(x,0) + z/2).
  double deviation1 = 0.0;
  /// H^1 seminorm of v2 - (-log(delta2^4 + |x|^4) + 8 pi H(x,0)).
  double deviation2 = 0.0;
  double delta1_fit = 0.0;  ///< scale refitted from v1
  double delta2_fit = 0.0;  ///< scale refitted from v2
};

/// Profile comparison for a converged solve. The scales are refitted by
/// weighted least squares in log(delta), with a free additive constant, over
/// nodes with |x| <= inradius / 2.
ProfileReport profile_check(const SolveReport& report, const AnsatzBundle& bundle);

struct ScalingFit {
  LinearFit delta1;  ///< log delta1_fit against log lambda
  LinearFit delta2;
};

ScalingFit fit_scalings(const std::vector<ProfileReport>& profiles);

}  // namespace toda
