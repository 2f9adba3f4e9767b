#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toda/ansatz.hpp"
#include "toda/field.hpp"
#include "toda/fit.hpp"
#include "toda/linearized.hpp"

namespace toda {

/// F1 = Delta_h u1 + 2 rho e^{u1}/int e^{u1} - lambda e^{u2},
/// F2 = Delta_h u2 + 2 lambda e^{u2} - rho e^{u1}/int e^{u1}, interior nodes
/// only (zero on the boundary).
FieldPair nonlinear_residual(const SparseOperator& op, const Eigen::VectorXd& u1,
                             const Eigen::VectorXd& u2, double lambda, double rho);

struct CorrectorOptions {
  double tolerance = 1e-9;  ///< sup-norm of (F1, F2)
  int max_iterations = 30;
  int max_halvings = 8;
  double epsilon = 0.05;    ///< bound ||phi|| <= lambda^(1/4 - epsilon)
};

struct NewtonStep {
  double residual = 0.0;   ///< sup |F| after the step
  double increment = 0.0;  ///< sup |t d|
  double damping = 1.0;    ///< accepted t
};

struct SolveReport {
  double lambda = 0.0;
  double rho = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool converged = false;
  FieldPair phi;
  FieldPair u;  ///< W + phi
  double phi_norm = 0.0;  ///< ||phi1||_{H^1_0} + ||phi2||_{H^1_0}
  double phi1_norm = 0.0;
  double phi2_norm = 0.0;
  double bound = 0.0;          ///< lambda^(1/4 - epsilon)
  double bound_margin = 0.0;   ///< log(bound) - log(phi_norm)
  bool bound_satisfied = false;
  double residual = 0.0;       ///< final sup |F|
  double initial_residual = 0.0;
  /// Tolerance applied: the requested one or 8x the rounding floor of Delta_h
  /// at the final iterate, whichever is larger.
  double tolerance = 0.0;
  double inverse_residual = 0.0;  ///< sup |(-Delta_h)^{-1} F|
  int iterations = 0;
  std::vector<NewtonStep> trace;
  bool warm_started = false;  ///< started from the rescaled previous correction
};

/// Damped Newton on u = W + phi with the linearization reassembled at every
/// iterate. Throws SolverError (with the residual history) on divergence.
SolveReport newton_correct(const AnsatzBundle& bundle, const CorrectorOptions& options = {},
                           const FieldPair* initial_phi = nullptr);

struct SweepReport {
  std::vector<SolveReport> reports;
  std::optional<LinearFit> fit;  ///< log ||phi|| against log lambda
  bool slope_ok = false;         ///< slope >= 1/4 - epsilon
  bool truncated = false;
  std::string failure;           ///< message of the solve that stopped the sweep
  double failed_lambda = 0.0;
};

/// Solves along a decreasing lambda schedule, warm-starting each point from
/// the previous correction scaled by (lambda / lambda_prev)^(1/4) when that
/// guess has the smaller initial residual (or falls back to phi = 0). A failure
/// at the first point throws; later failures truncate the sweep.
SweepReport sweep(const Background& background, const std::vector<double>& lambdas,
                  const CorrectorOptions& options = {});

}  // namespace toda
