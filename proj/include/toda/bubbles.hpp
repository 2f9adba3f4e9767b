#pragma once

#include <array>
#include <vector>

#include "toda/domain.hpp"
#include "toda/elliptic.hpp"
#include "toda/field.hpp"

namespace toda {

/// Liouville bubble w(x) = log(2 alpha^2 delta^alpha / (delta^alpha + |x|^alpha)^2),
/// an entire solution of -Delta w = |x|^(alpha-2) e^w.
struct BubbleParams {
  double alpha = 2.0;  ///< 2 (regular) or 4 (singular weight)
  double delta = 1.0;  ///< concentration scale
};

/// Throws ArgumentError unless alpha is 2 or 4 and delta > 0.
void validate(const BubbleParams& params);

double bubble_value(const BubbleParams& params, Point x);
double bubble_value(const BubbleParams& params, double r);
/// |x|^(alpha-2) e^{w(x)}.
double bubble_density(const BubbleParams& params, double r);
/// Z(x) = (delta^alpha - |x|^alpha) / (delta^alpha + |x|^alpha).
double z_function(const BubbleParams& params, Point x);

struct BubbleMass {
  double closed_form = 0.0;  ///< 4 pi alpha R^alpha / (delta^alpha + R^alpha)
  double quadrature = 0.0;
  double quadrature_error = 0.0;
};

/// Mass of |x|^(alpha-2) e^w over the ball of radius R. Throws SolverError
/// when quadrature and closed form disagree beyond 1e-6 relative.
BubbleMass bubble_mass(const BubbleParams& params, double R);

/// w sampled at every node.
Eigen::VectorXd bubble_field(const Grid& grid, const BubbleParams& params);

/// P w. Requires delta >= 2 * grid.min_spacing().
ScalarField projected_bubble(const SparseOperator& op, const BubbleParams& params);

/// sup |P w - (-2 log(delta^alpha + |x|^alpha) + 4 pi alpha H(x,0))| over all nodes.
double expansion_deviation(const SparseOperator& op, const BubbleParams& params,
                           const ScalarField& pw, const ScalarField& h0);

/// P Z, with the same resolution guard as projected_bubble.
ScalarField projected_Z(const SparseOperator& op, const BubbleParams& params);
/// sup |P Z - 2 delta^alpha / (delta^alpha + |x|^alpha)|.
double pz_deviation(const BubbleParams& params, const ScalarField& pz);

struct WeightedIdentities {
  double alpha = 0.0;
  /// <(1 - r^a)/(1 + r^a), g> with weight |y|^(a-2)/(1+|y|^a)^2 over R^2
  /// for g = 1, log(1 + |y|^a), log|y|.
  std::array<double, 3> values{};
  /// Quadrature error estimates (the whole plane is mapped onto [0, 1), so
  /// these also bound the truncation).
  std::array<double, 3> error_bounds{};
  /// Closed forms 0, -pi/a, -2 pi/a^2 of the same integrals.
  std::array<double, 3> closed_form{};
  /// Target values 0, -pi/a, -pi/(2 a^2) used by the acceptance check.
  std::array<double, 3> stated{};
};

WeightedIdentities weighted_identities(double alpha);

struct KernelResolution {
  int n_r = 160;
  int n_theta = 60;
  /// Target radial spacing at the origin (grading derived from it).
  double core_spacing = 0.02;
};

struct BubbleKernelReport {
  double alpha = 0.0;
  int k = 0;
  double r_trunc = 0.0;
  double threshold = 0.0;
  int near_zero_count = 0;
  double mode_residual = 0.0;
  /// Generalized eigenvalues mu of -Delta v = mu V v closest to 1, and |mu - 1|.
  std::vector<double> eigenvalues;
  std::vector<double> singular_values;
  Index unknowns = 0;
};

/// Counts the near-zero singular values of -Delta - 2 alpha^2 |y|^(alpha-2)/(1+|y|^alpha)^2
/// on the ball of radius r_trunc, restricted to k-symmetric functions (k = 1
/// disables the restriction). Functions are taken with a constant, otherwise
/// free, value on the truncation circle so that (1 - |y|^alpha)/(1 + |y|^alpha)
/// stays admissible.
BubbleKernelReport symmetric_kernel_check(double alpha, int k, double r_trunc,
                                          const KernelResolution& resolution = {},
                                          double threshold = 0.1);

}  // namespace toda
