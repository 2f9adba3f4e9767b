#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "toda/ansatz.hpp"
#include "toda/elliptic.hpp"
#include "toda/field.hpp"
#include "toda/fit.hpp"

namespace toda {

/// Linearization of the system at (u1, u2):
///   L1 = -Delta phi1 + lambda e^{u2} phi2 - 2 rho [g phi1 - g int g phi1]
///   L2 = -Delta phi2 - 2 lambda e^{u2} phi2 + rho [g phi1 - g int g phi1]
/// with g = e^{u1} / int e^{u1}. Unknowns vanish on the boundary.
class LinearizedOperator {
 public:
  const SparseOperator& laplacian() const { return op_; }
  const Grid& grid() const { return op_.grid(); }
  double lambda() const { return lambda_; }
  double rho() const { return rho_; }
  /// Symmetry order imposed on solutions (1 when none).
  int symmetry() const { return k_; }
  const Eigen::VectorXd& g() const { return g_; }      ///< e^{u1} / int e^{u1}
  const Eigen::VectorXd& f2() const { return f2_; }    ///< lambda e^{u2}

  /// (L1, L2) at interior nodes, zero on the boundary.
  FieldPair apply(const FieldPair& phi) const;
  /// Solves L phi = f for interior values f.
  FieldPair solve(const FieldPair& f) const;
  /// Solves L phi = Delta_h h for zero-trace h.
  FieldPair solve_laplacian_form(const FieldPair& h) const;

  /// Normwise backward error |b - A x| / (| |A| |x| | + |b|) of the last
  /// weak-form solve; solves throw SolverError above 1e-9.
  double last_residual() const { return last_residual_; }

  /// Weak-form solves on the 2 n_interior stacked interior vector:
  /// A x = b and A^T x = b, A = W L with W the quadrature weights.
  Eigen::VectorXd solve_weak(const Eigen::VectorXd& b) const;
  Eigen::VectorXd solve_weak_transpose(const Eigen::VectorXd& b) const;
  Eigen::VectorXd apply_weak(const Eigen::VectorXd& x) const;

  friend LinearizedOperator assemble_linearized(const SparseOperator&, const Eigen::VectorXd&,
                                                const Eigen::VectorXd&, double, double, int);

 private:
  LinearizedOperator() = default;
  Eigen::VectorXd stack(const FieldPair& p) const;
  FieldPair unstack(const Eigen::VectorXd& x) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_weak_abs(const Eigen::VectorXd& x) const;

  SparseOperator op_;
  double lambda_ = 0.0;
  double rho_ = 0.0;
  int k_ = 1;
  Eigen::VectorXd g_;
  Eigen::VectorXd f2_;
  Eigen::VectorXd a_;  ///< w g on interior nodes
  std::shared_ptr<const SparseMatrix> abs_k_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::AMDOrdering<int>>> lu_;
  mutable double last_residual_ = 0.0;
};

/// Linearization at arbitrary (u1, u2). k > 1 restricts solves to k-symmetric
/// pairs (the grid must be invariant); k = 1 solves on the full space.
LinearizedOperator assemble_linearized(const SparseOperator& op, const Eigen::VectorXd& u1,
                                       const Eigen::VectorXd& u2, double lambda, double rho,
                                       int k);
/// Linearization at the ansatz (W1, W2), with the grid's symmetry order when the
/// grid is invariant.
LinearizedOperator assemble_linearized(const AnsatzBundle& bundle);

struct ProbeOptions {
  int trials = 10;
  int power_steps = 12;
  std::uint64_t seed = 1;
};

struct ProbeSample {
  double lambda = 0.0;
  int trial = 0;
  double ratio = 0.0;  ///< (||phi1|| + ||phi2||) / (||h1|| + ||h2||) in H^1_0
};

struct NormProbe {
  std::vector<ProbeSample> samples;
  std::vector<double> lambda;
  std::vector<double> max_ratio;  ///< per lambda
  LinearFit log_fit;              ///< max_ratio = a + b |log lambda|
  /// Largest relative drop of max_ratio as lambda decreases (0 if monotone).
  double max_relative_drop = 0.0;
};

/// Estimates ||L^{-1} Delta||_{H^1_0 -> H^1_0} per operator. Every trial starts
/// from a random (symmetric when the operator is) h and refines it by power
/// iteration on T^* T, T h = L^{-1} Delta_h h, in the H^1_0 product; the ratio
/// of the final iterate is recorded.
NormProbe norm_probe(const std::vector<LinearizedOperator>& ops, const ProbeOptions& options);

}  // namespace toda
