#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "toda/field.hpp"

namespace toda {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete -Delta on a grid in stiffness form. The full matrix K acts on all
/// nodes; the interior block K_II is factored once. For interior i,
/// (Delta_h u)_i = -(K u)_i / w_i.
class SparseOperator {
 public:
  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }

  const SparseMatrix& stiffness() const { return impl_->full; }
  const SparseMatrix& interior_block() const { return impl_->interior; }
  /// Interior rows, boundary columns.
  const SparseMatrix& coupling_block() const { return impl_->coupling; }
  const Eigen::VectorXd& interior_weights() const { return impl_->interior_weights; }

  /// Delta_h u at interior nodes (u given on all nodes).
  Eigen::VectorXd laplacian(const Eigen::VectorXd& u) const;
  /// Solves K_II x = load. Throws SolverError when the relative residual
  /// exceeds 1e-10.
  Eigen::VectorXd solve_interior(const Eigen::VectorXd& load) const;
  /// Discrete Dirichlet energy sum_e c_e (u_a - u_b)^2 over all links.
  double energy(const Eigen::VectorXd& u) const;
  /// True when the iterative fallback is used instead of the factorization.
  bool iterative() const { return impl_->iterative; }

  friend SparseOperator assemble_laplacian(std::shared_ptr<const Grid> grid);

 private:
  using Direct = Eigen::SimplicialLDLT<SparseMatrix>;
  using Iterative = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                             Eigen::IncompleteCholesky<double>>;
  struct Impl {
    SparseMatrix full;
    SparseMatrix interior;
    SparseMatrix coupling;
    Eigen::VectorXd interior_weights;
    bool iterative = false;
    std::unique_ptr<Direct> direct;
    std::unique_ptr<Iterative> cg;
  };
  std::shared_ptr<const Grid> grid_;
  std::shared_ptr<const Impl> impl_;
};

/// Above this many interior nodes the solves switch from sparse LDL^T to
/// incomplete-Cholesky preconditioned CG.
inline constexpr Index kDirectSolveLimit = 200000;

SparseOperator assemble_laplacian(std::shared_ptr<const Grid> grid);

/// Solves -Delta_h u = rhs in the interior, u = 0 on the boundary.
ScalarField poisson_solve(const SparseOperator& op, const ScalarField& rhs);

/// Discrete harmonic function with the given boundary values (one per
/// boundary node, in grid order).
ScalarField harmonic_extension(const SparseOperator& op, const Eigen::VectorXd& boundary_values);

/// Pu = u - harmonic_extension(u on the boundary).
ScalarField project_P(const SparseOperator& op, const ScalarField& u);

struct GreenRegular {
  ScalarField field;      ///< H(., pole)
  double at_pole = 0.0;   ///< H(pole, pole)
};

/// Regular part of the Dirichlet Green's function,
/// H(x, y) = G(x, y) - (1/2pi) log(1/|x - y|).
GreenRegular green_regular_part(const SparseOperator& op, Point pole);

struct Norms {
  double lp = 0.0;
  double h10 = 0.0;
};

double lp_norm(const Grid& grid, const Eigen::VectorXd& values, double p);
/// sqrt of the discrete Dirichlet energy.
double h10_norm(const SparseOperator& op, const Eigen::VectorXd& values);
Norms norms(const SparseOperator& op, const ScalarField& f, double p);

/// Quadrature of f over the domain.
double integrate(const Grid& grid, const Eigen::VectorXd& values);

/// Value at the origin: the node itself on Cartesian grids, quadratic
/// extrapolation in r^2 of the first three ring averages on polar grids.
double origin_value(const Grid& grid, const Eigen::VectorXd& values);
/// Bilinear interpolation (in s and theta on polar grids).
double interpolate(const Grid& grid, const Eigen::VectorXd& values, Point p);

void write_field_csv(std::ostream& out, const std::string& name, const ScalarField& field);
void write_field_csv(const std::string& path, const std::string& name, const ScalarField& field);

/// Values of a point function at every node.
template <class F>
Eigen::VectorXd sample(const Grid& grid, F&& f) {
  Eigen::VectorXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = f(grid.node(i));
  return v;
}

}  // namespace toda
