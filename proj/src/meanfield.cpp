#include "toda/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SparseLU>

#include "toda/error.hpp"
#include "toda/spectral.hpp"

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

struct Exponential {
  Eigen::VectorXd q;  ///< e^{z - shift} on all nodes
  double sum = 0.0;   ///< sum_i w_i q_i
  double shift = 0.0;
};

Exponential shifted_exp(const Grid& g, const Eigen::VectorXd& z) {
  Exponential e;
  e.shift = z.maxCoeff();
  e.q = (z.array() - e.shift).exp().matrix();
  e.sum = g.weights().dot(e.q);
  if (!std::isfinite(e.sum) || !(e.sum > 0.0)) throw RangeError("e^z is not integrable on the grid");
  return e;
}

// Weak residual K z - w theta e^z / int e^z on interior rows.
Eigen::VectorXd weak_residual(const SparseOperator& op, const Eigen::VectorXd& z, double theta,
                              const Exponential& e) {
  const Index ni = op.grid().interior_count();
  return op.interior_block() * z.head(ni) + op.coupling_block() * z.tail(z.size() - ni) -
         (theta / e.sum) * op.interior_weights().cwiseProduct(e.q.head(ni));
}

// [K - theta/S diag(w q), theta/S^2 a; a^T, -1] with a = w q on interior rows.
SparseMatrix bordered_jacobian(const SparseOperator& op, double theta, const Exponential& e) {
  const Index ni = op.grid().interior_count();
  const Eigen::VectorXd a = op.interior_weights().cwiseProduct(e.q.head(ni));
  const SparseMatrix& k = op.interior_block();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(k.nonZeros() + 3 * ni + 1));
  for (Index c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  }
  const double s = e.sum;
  for (Index i = 0; i < ni; ++i) {
    trip.emplace_back(i, i, -theta / s * a[i]);
    trip.emplace_back(i, ni, theta / (s * s) * a[i]);
    trip.emplace_back(ni, i, a[i]);
  }
  trip.emplace_back(ni, ni, -1.0);
  SparseMatrix j(ni + 1, ni + 1);
  j.setFromTriplets(trip.begin(), trip.end());
  j.makeCompressed();
  return j;
}

Eigen::VectorXd maybe_symmetrize(const Grid& g, const Eigen::VectorXd& v) {
  if (!g.rotation_invariant()) return v;
  return symmetrize(g, v, g.symmetry_order());
}

struct StageResult {
  Eigen::VectorXd z;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residuals;
  std::vector<double> increments;
  double tolerance = 0.0;
};

StageResult newton_stage(const SparseOperator& op, double theta, Eigen::VectorXd z,
                         const MeanFieldOptions& opt) {
  const Grid& g = op.grid();
  const Index ni = g.interior_count();
  z.tail(g.boundary_count()).setZero();
  z = maybe_symmetrize(g, z);
  StageResult st;
  Exponential e = shifted_exp(g, z);
  double res = meanfield_residual(op, z, theta);
  double tol = std::max(opt.tolerance, 8.0 * residual_floor(op, z));
  st.residuals.push_back(res);
  for (int it = 0; it < opt.max_iterations && res > tol; ++it) {
    const Eigen::VectorXd gres = weak_residual(op, z, theta, e);
    Eigen::SparseLU<SparseMatrix> lu(bordered_jacobian(op, theta, e));
    if (lu.info() != Eigen::Success) throw SolverError("mean-field Jacobian is singular", st.residuals);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + 1);
    rhs.head(ni) = -gres;
    const Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(g.size());
    step.head(ni) = sol.head(ni);
    step = maybe_symmetrize(g, step);

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd trial = z + t * step;
      double trial_res = 0.0;
      try {
        trial_res = meanfield_residual(op, trial, theta);
      } catch (const RangeError&) {
        continue;
      }
      if (std::isfinite(trial_res) && (trial_res <= (1.0 - 1e-4 * t) * res || trial_res <= tol)) {
        z = std::move(trial);
        res = trial_res;
        accepted = true;
        break;
      }
    }
    st.increments.push_back(t * step.cwiseAbs().maxCoeff());
    st.residuals.push_back(res);
    st.iterations = it + 1;
    if (!accepted) throw SolverError("mean-field Newton stagnated", st.residuals);
    e = shifted_exp(g, z);
    tol = std::max(opt.tolerance, 8.0 * residual_floor(op, z));
  }
  if (!(res <= tol)) {
    throw SolverError("mean-field Newton did not converge", st.residuals);
  }
  st.z = std::move(z);
  st.residual = res;
  st.tolerance = tol;
  return st;
}

}  // namespace

void check_rho(double rho) {
  if (!(rho > 4.0 * kPi && rho < 8.0 * kPi)) {
    throw ArgumentError("rho must lie in (4 pi, 8 pi), got " + num_text(rho));
  }
}

double residual_floor(const SparseOperator& op, const Eigen::VectorXd& u) {
  const Grid& g = op.grid();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(g.size());
  for (const Edge& e : g.edges()) {
    const double t = e.conductance * (std::abs(u[e.a]) + std::abs(u[e.b]));
    acc[e.a] += t;
    acc[e.b] += t;
  }
  const Index ni = g.interior_count();
  return std::numeric_limits<double>::epsilon() *
         acc.head(ni).cwiseQuotient(op.interior_weights()).maxCoeff();
}

double meanfield_residual(const SparseOperator& op, const Eigen::VectorXd& z, double theta) {
  const Grid& g = op.grid();
  const Exponential e = shifted_exp(g, z);
  const Index ni = g.interior_count();
  const Eigen::VectorXd lap = op.laplacian(z);
  return (lap + (theta / e.sum) * e.q.head(ni)).cwiseAbs().maxCoeff();
}

MeanFieldSolution solve_meanfield(const SparseOperator& op, double rho,
                                  const ScalarField* initial_guess, const MeanFieldOptions& opt) {
  check_rho(rho);
  const Grid& g = op.grid();
  const double theta = 2.0 * (rho - 4.0 * kPi);
  StageResult st;
  if (initial_guess) {
    if (initial_guess->size() != g.size()) throw DomainError("initial guess does not match grid");
    st = newton_stage(op, theta, initial_guess->values, opt);
  } else {
    const double start = std::min(4.0 * kPi + 0.1, rho);
    const int steps = std::max(1, static_cast<int>(std::ceil((rho - start) / opt.continuation_step)));
    Eigen::VectorXd z = Eigen::VectorXd::Zero(g.size());
    for (int s = 0; s <= steps; ++s) {
      const double r = start + (rho - start) * s / steps;
      st = newton_stage(op, 2.0 * (r - 4.0 * kPi), z, opt);
      z = st.z;
    }
  }
  MeanFieldSolution sol;
  sol.rho = rho;
  sol.theta = theta;
  sol.z = ScalarField(op.grid_ptr(), st.z);
  sol.mass_integral = integrate(g, st.z.array().exp().matrix());
  sol.z_at_origin = origin_value(g, st.z);
  sol.residual = st.residual;
  sol.tolerance = st.tolerance;
  sol.iterations = st.iterations;
  sol.residual_history = std::move(st.residuals);
  sol.increment_history = std::move(st.increments);
  return sol;
}

double certify_nondegeneracy(const SparseOperator& op, MeanFieldSolution& sol, int k) {
  const Grid& g = op.grid();
  const Index ni = g.interior_count();
  const Exponential e = shifted_exp(g, sol.z.values);
  Eigen::SparseLU<SparseMatrix> lu(bordered_jacobian(op, sol.theta, e));
  if (lu.info() != Eigen::Success) throw SolverError("linearized mean-field operator is singular");
  const Eigen::VectorXd root_w = op.interior_weights().cwiseSqrt();
  const bool project = k > 1;
  if (project && g.rotation_map(k).empty()) {
    throw DomainError("grid is not invariant under the requested symmetry");
  }
  // B^{-1} = M^{1/2} J^{-1} M^{1/2}, symmetric in the Euclidean product
  BlockMap apply = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y(ni, x.cols());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + 1);
    for (Index c = 0; c < x.cols(); ++c) {
      rhs.head(ni) = root_w.cwiseProduct(x.col(c));
      y.col(c) = root_w.cwiseProduct(lu.solve(rhs).head(ni));
    }
    return y;
  };
  BlockMap projector;
  if (project) {
    projector = [&](const Eigen::MatrixXd& x) {
      Eigen::MatrixXd y(ni, x.cols());
      Eigen::VectorXd full = Eigen::VectorXd::Zero(g.size());
      for (Index c = 0; c < x.cols(); ++c) {
        full.head(ni) = x.col(c);
        y.col(c) = symmetrize(g, full, k).head(ni);
      }
      return y;
    };
  }
  RitzPairs rp = dominant_eigenpairs(apply, ni, 1, 4, 1e-10, 500, 0xc0ffee, projector);
  if (!rp.converged) throw SolverError("nondegeneracy eigen-solver did not converge");
  const double sigma = 1.0 / std::abs(rp.values[0]);
  sol.smallest_singular_value = sigma;
  return sigma;
}

DiskMeanField::DiskMeanField(double radius_, double rho_) : radius(radius_), rho(rho_) {
  check_rho(rho_);
  d2 = 8.0 * kPi / (2.0 * (rho_ - 4.0 * kPi)) - 1.0;
}

double DiskMeanField::z(double r) const {
  const double s = r / radius;
  return 2.0 * std::log((1.0 + d2) / (d2 + s * s));
}

double DiskMeanField::mass_integral() const { return kPi * radius * radius * (1.0 + d2) / d2; }

double DiskMeanField::ball_fraction(double r) const {
  const double s = std::min(r / radius, 1.0);
  return (1.0 + d2) * s * s / (d2 + s * s);
}

}  // namespace toda
