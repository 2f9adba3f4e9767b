#include "toda/corrector.hpp"

#include <algorithm>
#include <cmath>

#include "toda/error.hpp"
#include "toda/meanfield.hpp"

namespace toda {

namespace {

double sup_pair(const FieldPair& f) {
  return std::max(f.first.values.cwiseAbs().maxCoeff(), f.second.values.cwiseAbs().maxCoeff());
}

// Residual sup-norm, or +inf when the exponentials leave the arithmetic range.
double try_residual(const SparseOperator& op, const Eigen::VectorXd& u1, const Eigen::VectorXd& u2,
                    double lambda, double rho) {
  try {
    const double r = sup_pair(nonlinear_residual(op, u1, u2, lambda, rho));
    return std::isfinite(r) ? r : HUGE_VAL;
  } catch (const RangeError&) {
    return HUGE_VAL;
  }
}

}  // namespace

FieldPair nonlinear_residual(const SparseOperator& op, const Eigen::VectorXd& u1,
                             const Eigen::VectorXd& u2, double lambda, double rho) {
  const Grid& g = op.grid();
  const Index ni = g.interior_count();
  const ExpTerms t = exp_terms(g, u1, u2, lambda);
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd f2 = Eigen::VectorXd::Zero(g.size());
  f1.head(ni) = op.laplacian(u1) + 2.0 * rho * t.g1.head(ni) - t.f2.head(ni);
  f2.head(ni) = op.laplacian(u2) + 2.0 * t.f2.head(ni) - rho * t.g1.head(ni);
  return {ScalarField(op.grid_ptr(), std::move(f1)), ScalarField(op.grid_ptr(), std::move(f2))};
}

SolveReport newton_correct(const AnsatzBundle& b, const CorrectorOptions& opt,
                           const FieldPair* initial_phi) {
  if (!(opt.epsilon > 0.0 && opt.epsilon < 0.25)) throw ArgumentError("epsilon must lie in (0, 1/4)");
  const SparseOperator& op = b.op;
  const Grid& g = op.grid();
  const Index ni = g.interior_count();
  const int k = g.rotation_invariant() ? g.symmetry_order() : 1;

  Eigen::VectorXd u1 = b.w1.values;
  Eigen::VectorXd u2 = b.w2.values;
  if (initial_phi) {
    if (initial_phi->first.size() != g.size() || initial_phi->second.size() != g.size()) {
      throw DomainError("initial correction does not match the grid");
    }
    u1.head(ni) += initial_phi->first.values.head(ni);
    u2.head(ni) += initial_phi->second.values.head(ni);
    if (k > 1) {
      u1 = symmetrize(g, u1, k);
      u2 = symmetrize(g, u2, k);
    }
  }

  SolveReport rep;
  rep.lambda = b.lambda;
  rep.rho = b.rho;
  rep.delta1 = b.delta1;
  rep.delta2 = b.delta2;
  auto floor_tol = [&] {
    return std::max(opt.tolerance, 8.0 * std::max(residual_floor(op, u1), residual_floor(op, u2)));
  };

  FieldPair f = nonlinear_residual(op, u1, u2, b.lambda, b.rho);
  double res = sup_pair(f);
  double tol = floor_tol();
  rep.initial_residual = res;
  std::vector<double> history{res};
  const Eigen::VectorXd& w = op.interior_weights();
  for (int it = 0; it < opt.max_iterations && res > tol; ++it) {
    const LinearizedOperator L = assemble_linearized(op, u1, u2, b.lambda, b.rho, k);
    Eigen::VectorXd rhs(2 * ni);
    rhs << w.cwiseProduct(f.first.values.head(ni)), w.cwiseProduct(f.second.values.head(ni));
    const Eigen::VectorXd d = L.solve_weak(rhs);

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd t1 = u1;
      Eigen::VectorXd t2 = u2;
      t1.head(ni) += t * d.head(ni);
      t2.head(ni) += t * d.tail(ni);
      const double tr = try_residual(op, t1, t2, b.lambda, b.rho);
      if (tr <= (1.0 - 1e-4 * t) * res || tr <= tol) {
        u1 = std::move(t1);
        u2 = std::move(t2);
        res = tr;
        accepted = true;
        break;
      }
    }
    history.push_back(res);
    if (!accepted) throw SolverError("Newton correction stagnated", history);
    rep.trace.push_back({res, t * d.cwiseAbs().maxCoeff(), t});
    rep.iterations = it + 1;
    f = nonlinear_residual(op, u1, u2, b.lambda, b.rho);
    tol = floor_tol();
  }
  if (!(res <= tol)) throw SolverError("Newton correction did not converge", history);

  rep.converged = true;
  rep.residual = res;
  rep.tolerance = tol;
  const ScalarField r1 = poisson_solve(op, f.first);
  const ScalarField r2 = poisson_solve(op, f.second);
  rep.inverse_residual = std::max(r1.values.cwiseAbs().maxCoeff(), r2.values.cwiseAbs().maxCoeff());

  Eigen::VectorXd p1 = u1 - b.w1.values;
  Eigen::VectorXd p2 = u2 - b.w2.values;
  rep.phi1_norm = h10_norm(op, p1);
  rep.phi2_norm = h10_norm(op, p2);
  rep.phi_norm = rep.phi1_norm + rep.phi2_norm;
  rep.bound = std::pow(b.lambda, 0.25 - opt.epsilon);
  rep.bound_margin = std::log(rep.bound) - std::log(rep.phi_norm);
  rep.bound_satisfied = rep.phi_norm < rep.bound;
  rep.phi = {ScalarField(op.grid_ptr(), std::move(p1)), ScalarField(op.grid_ptr(), std::move(p2))};
  rep.u = {ScalarField(op.grid_ptr(), std::move(u1)), ScalarField(op.grid_ptr(), std::move(u2))};
  return rep;
}

SweepReport sweep(const Background& bg, const std::vector<double>& lambdas,
                  const CorrectorOptions& opt) {
  if (lambdas.size() < 2) throw ArgumentError("sweep needs at least two lambda values");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] < lambdas[i - 1])) throw ArgumentError("lambda schedule must be strictly decreasing");
  }
  SweepReport out;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    try {
      const AnsatzBundle b = assemble_ansatz(bg, lambda);
      if (out.reports.empty()) {
        out.reports.push_back(newton_correct(b, opt));
        continue;
      }
      const SolveReport& prev = out.reports.back();
      const double scale = std::pow(lambda / prev.lambda, 0.25);
      FieldPair guess{ScalarField(prev.phi.first.grid, scale * prev.phi.first.values),
                      ScalarField(prev.phi.second.grid, scale * prev.phi.second.values)};
      // The rescaled correction lives on the previous bubble scale; keep it
      // only when it starts closer to a solution than the bare ansatz.
      const double warm = try_residual(b.op, b.w1.values + guess.first.values,
                                       b.w2.values + guess.second.values, lambda, b.rho);
      const double cold = try_residual(b.op, b.w1.values, b.w2.values, lambda, b.rho);
      if (warm < cold) {
        try {
          SolveReport r = newton_correct(b, opt, &guess);
          r.warm_started = true;
          out.reports.push_back(std::move(r));
          continue;
        } catch (const SolverError&) {
        }
      }
      out.reports.push_back(newton_correct(b, opt));
    } catch (const Error& e) {
      if (i == 0) throw;
      out.truncated = true;
      out.failure = e.what();
      out.failed_lambda = lambda;
      break;
    }
  }
  if (out.reports.size() >= 3) {
    std::vector<double> lam;
    std::vector<double> nrm;
    for (const SolveReport& r : out.reports) {
      lam.push_back(r.lambda);
      nrm.push_back(r.phi_norm);
    }
    out.fit = fit_power_law(lam, nrm);
    out.slope_ok = out.fit->slope >= 0.25 - opt.epsilon;
  }
  return out;
}

}  // namespace toda
