#pragma once

#include <optional>
#include <vector>

#include "toda/elliptic.hpp"
#include "toda/field.hpp"

namespace toda {

struct MeanFieldOptions {
  double tolerance = 1e-8;   ///< sup-norm of Delta_h z + theta e^z / int e^z
  int max_iterations = 60;
  int max_halvings = 8;
  /// Largest rho step of the continuation ladder started at 4 pi + 0.1.
  double continuation_step = 1.5;
};

/// Solution of -Delta z = theta e^z / int e^z, z = 0 on the boundary,
/// theta = 2 (rho - 4 pi).
struct MeanFieldSolution {
  ScalarField z;
  double rho = 0.0;
  double theta = 0.0;
  double mass_integral = 0.0;  ///< int e^z
  double z_at_origin = 0.0;
  double residual = 0.0;       ///< final sup-norm residual
  /// Tolerance actually applied: the requested one, or 8x the floating-point
  /// floor of the stencil when that is larger (strongly graded grids).
  double tolerance = 0.0;
  int iterations = 0;          ///< Newton steps of the final continuation stage
  std::vector<double> residual_history;
  std::vector<double> increment_history;  ///< sup-norm of the Newton updates
  std::optional<double> smallest_singular_value;
};

/// Damped Newton with the full nonlocal Jacobian, symmetrized after every step.
/// Without an initial guess the solve is continued in rho from 4 pi + 0.1.
MeanFieldSolution solve_meanfield(const SparseOperator& op, double rho,
                                  const ScalarField* initial_guess = nullptr,
                                  const MeanFieldOptions& options = {});

/// Rounding floor eps * max_i sum_e c_e (|u_a| + |u_b|) / w_i of Delta_h u in
/// the sup norm.
double residual_floor(const SparseOperator& op, const Eigen::VectorXd& u);

/// Sup-norm of Delta_h z + theta e^z / int e^z over interior nodes.
double meanfield_residual(const SparseOperator& op, const Eigen::VectorXd& z, double theta);

/// Smallest singular value, in the weighted L^2 sense, of
/// psi -> -Delta psi - theta [e^z psi / int e^z - e^z int e^z psi / (int e^z)^2]
/// on k-symmetric zero-trace functions. Stores the value in `sol`.
double certify_nondegeneracy(const SparseOperator& op, MeanFieldSolution& sol, int k);

/// Radial closed-form solution on a disk of the given radius:
/// z(x) = 2 log((1 + d^2) / (d^2 + |x/R|^2)), d^2 = 8 pi / theta - 1.
struct DiskMeanField {
  double radius = 1.0;
  double rho = 0.0;
  double d2 = 0.0;

  DiskMeanField(double radius, double rho);
  double z(double r) const;
  double z0() const { return z(0.0); }
  double mass_integral() const;
  /// int_{B_r} e^z / int e^z.
  double ball_fraction(double r) const;
};

/// Throws ArgumentError unless 4 pi < rho < 8 pi.
void check_rho(double rho);

}  // namespace toda
