#pragma once

#include <memory>
#include <vector>

#include "toda/elliptic.hpp"
#include "toda/field.hpp"
#include "toda/fit.hpp"
#include "toda/meanfield.hpp"

namespace toda {

/// Pieces of the approximate solution that depend on the domain and rho only.
struct Background {
  SparseOperator op;
  std::shared_ptr<const MeanFieldSolution> mf;
  GreenRegular h;  ///< H(., 0) and H(0, 0)
};

Background make_background(const SparseOperator& op, double rho,
                           const MeanFieldOptions& options = {});

struct Deltas {
  double delta1 = 0.0;
  double delta2 = 0.0;
  static constexpr double exponent1 = 0.5;   ///< delta1 ~ lambda^(1/2)
  static constexpr double exponent2 = 0.25;  ///< delta2 ~ lambda^(1/4)
};

/// delta1 = (1/8) sqrt((rho - 4 pi) lambda / int e^z) e^{6 pi H00 + z0/4},
/// delta2 = (1/2) lambda^(1/4) e^{3 pi H00 - z0/8}.
Deltas compute_deltas(double lambda, double rho, double z0, double mass_integral, double h00);
Deltas compute_deltas(double lambda, const MeanFieldSolution& mf, double h00);
/// delta2 > delta1 exactly for lambda below this value.
double lambda_cross(double rho, double z0, double mass_integral, double h00);

/// W1 = P w1 - P w2 / 2 + z, W2 = P w2 - P w1 / 2 - z / 2, with w1 the
/// alpha = 2 bubble at scale delta1 and w2 the alpha = 4 bubble at delta2.
struct AnsatzBundle {
  double lambda = 0.0;
  double rho = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  ScalarField pw1;
  ScalarField pw2;
  ScalarField w1;  ///< W1
  ScalarField w2;  ///< W2
  SparseOperator op;
  std::shared_ptr<const MeanFieldSolution> mf;
  ScalarField h_field;
  double h00 = 0.0;
};

/// Throws ResolutionError (carrying the smallest admissible lambda) when
/// delta1 is below twice the smallest radial spacing.
AnsatzBundle assemble_ansatz(const Background& bg, double lambda);

/// e^{u1} / int e^{u1} and lambda e^{u2} at every node, evaluated in
/// shifted log space.
struct ExpTerms {
  Eigen::VectorXd g1;
  Eigen::VectorXd f2;
  double integral1 = 0.0;  ///< int e^{u1}
};

ExpTerms exp_terms(const Grid& grid, const Eigen::VectorXd& u1, const Eigen::VectorXd& u2,
                   double lambda);

struct ErrorFields {
  ScalarField e1;  ///< 2 rho e^{W1}/int e^{W1} - e^{w1} - 2 (rho - 4 pi) e^z / int e^z
  ScalarField e2;  ///< 2 lambda e^{W2} - |x|^2 e^{w2}
  double integral_w1 = 0.0;            ///< int e^{W1}
  double integral_w1_predicted = 0.0;  ///< rho / (rho - 4 pi) int e^z
};

ErrorFields error_fields(const AnsatzBundle& bundle);

/// R1 = -Delta_h W1 - 2 rho e^{W1}/int e^{W1} + lambda e^{W2},
/// R2 = -Delta_h W2 - 2 lambda e^{W2} + rho e^{W1}/int e^{W1}, on interior
/// nodes (zero on the boundary).
FieldPair residual_fields(const AnsatzBundle& bundle);

struct ResidualReport {
  double lambda = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::vector<double> p;
  std::vector<double> e1_norm;
  std::vector<double> e2_norm;
  std::vector<double> r1_norm;
  std::vector<double> r2_norm;
  /// L^1 distance between R and its expression through E1, E2:
  /// R1 ~ -E1 + E2/2, R2 ~ -E2 + E1/2 up to the truncation error of Delta_h.
  double identity_gap1 = 0.0;
  double identity_gap2 = 0.0;
  double integral_w1 = 0.0;
  double integral_w1_predicted = 0.0;
};

ResidualReport residual(const AnsatzBundle& bundle, const std::vector<double>& p_grid);

struct RateFits {
  LinearFit e1;
  LinearFit e2;
  LinearFit r;  ///< ||R1||_1 + ||R2||_1
};

/// Power-law fits against lambda of the p = 1 norms (p = 1 must be in the p-grid).
RateFits fit_rates(const std::vector<ResidualReport>& reports);

}  // namespace toda
