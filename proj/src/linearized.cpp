#include "toda/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "toda/error.hpp"

namespace toda {

LinearizedOperator assemble_linearized(const SparseOperator& op, const Eigen::VectorXd& u1,
                                       const Eigen::VectorXd& u2, double lambda, double rho,
                                       int k) {
  const Grid& grid = op.grid();
  if (u1.size() != grid.size() || u2.size() != grid.size()) {
    throw DomainError("linearization point does not match the grid");
  }
  if (k > 1 && grid.rotation_map(k).empty()) {
    throw DomainError("grid is not invariant under the requested symmetry");
  }
  const ExpTerms t = exp_terms(grid, u1, u2, lambda);
  const Index ni = grid.interior_count();
  const Eigen::VectorXd& w = op.interior_weights();

  LinearizedOperator L;
  L.op_ = op;
  L.lambda_ = lambda;
  L.rho_ = rho;
  L.k_ = std::max(k, 1);
  L.g_ = t.g1;
  L.f2_ = t.f2;
  L.a_ = w.cwiseProduct(t.g1.head(ni));
  const Eigen::VectorXd& a = L.a_;
  const Eigen::VectorXd wf = w.cwiseProduct(t.f2.head(ni));

  // Bordered form with s = a^T phi1 as an extra unknown. The two components
  // are interleaved (phi1_i -> 2i, phi2_i -> 2i+1) to keep the fill of the
  // factorization close to that of the scalar Laplacian.
  const SparseMatrix& kk = op.interior_block();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(2 * kk.nonZeros() + 7 * ni + 1));
  for (Index c = 0; c < kk.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(kk, c); it; ++it) {
      trip.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      trip.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  }
  const Index s = 2 * ni;
  for (Index i = 0; i < ni; ++i) {
    trip.emplace_back(2 * i, 2 * i, -2.0 * rho * a[i]);
    trip.emplace_back(2 * i, 2 * i + 1, wf[i]);
    trip.emplace_back(2 * i, s, 2.0 * rho * a[i]);
    trip.emplace_back(2 * i + 1, 2 * i, rho * a[i]);
    trip.emplace_back(2 * i + 1, 2 * i + 1, -2.0 * wf[i]);
    trip.emplace_back(2 * i + 1, s, -rho * a[i]);
    trip.emplace_back(s, 2 * i, a[i]);
  }
  trip.emplace_back(s, s, -1.0);
  SparseMatrix m(s + 1, s + 1);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  L.abs_k_ = std::make_shared<const SparseMatrix>(kk.cwiseAbs());
  L.lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::AMDOrdering<int>>>();
  L.lu_->analyzePattern(m);
  L.lu_->factorize(m);
  if (L.lu_->info() != Eigen::Success) throw SolverError("linearized operator is singular");
  return L;
}

LinearizedOperator assemble_linearized(const AnsatzBundle& b) {
  const Grid& g = b.op.grid();
  const int k = g.rotation_invariant() ? g.symmetry_order() : 1;
  return assemble_linearized(b.op, b.w1.values, b.w2.values, b.lambda, b.rho, k);
}

Eigen::VectorXd LinearizedOperator::stack(const FieldPair& p) const {
  const Index ni = grid().interior_count();
  Eigen::VectorXd x(2 * ni);
  x << p.first.values.head(ni), p.second.values.head(ni);
  return x;
}

FieldPair LinearizedOperator::unstack(const Eigen::VectorXd& x) const {
  const Index ni = grid().interior_count();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(grid().size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(grid().size());
  a.head(ni) = x.head(ni);
  b.head(ni) = x.tail(ni);
  return {ScalarField(op_.grid_ptr(), std::move(a)), ScalarField(op_.grid_ptr(), std::move(b))};
}

Eigen::VectorXd LinearizedOperator::project(const Eigen::VectorXd& x) const {
  if (k_ <= 1) return x;
  const Grid& g = grid();
  const Index ni = g.interior_count();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd out(x.size());
  for (int c = 0; c < 2; ++c) {
    full.head(ni) = x.segment(c * ni, ni);
    out.segment(c * ni, ni) = symmetrize(g, full, k_).head(ni);
  }
  return out;
}

Eigen::VectorXd LinearizedOperator::apply_weak(const Eigen::VectorXd& x) const {
  const Index ni = grid().interior_count();
  const Eigen::VectorXd& w = op_.interior_weights();
  const auto p1 = x.head(ni);
  const auto p2 = x.tail(ni);
  const Eigen::VectorXd wf = w.cwiseProduct(f2_.head(ni));
  const double s = a_.dot(p1);
  const Eigen::VectorXd bracket = a_.cwiseProduct(p1) - s * a_;
  Eigen::VectorXd y(2 * ni);
  y.head(ni) = op_.interior_block() * p1 + wf.cwiseProduct(p2) - 2.0 * rho_ * bracket;
  y.tail(ni) = op_.interior_block() * p2 - 2.0 * wf.cwiseProduct(p2) + rho_ * bracket;
  return y;
}

Eigen::VectorXd LinearizedOperator::apply_weak_abs(const Eigen::VectorXd& x) const {
  const Index ni = grid().interior_count();
  const Eigen::VectorXd& w = op_.interior_weights();
  const Eigen::VectorXd ax = x.cwiseAbs();
  const auto p1 = ax.head(ni);
  const auto p2 = ax.tail(ni);
  const Eigen::VectorXd wf = w.cwiseProduct(f2_.head(ni));
  const double s = a_.dot(p1);
  const Eigen::VectorXd bracket = a_.cwiseProduct(p1) + s * a_;
  Eigen::VectorXd y(2 * ni);
  y.head(ni) = *abs_k_ * p1 + wf.cwiseProduct(p2) + 2.0 * rho_ * bracket;
  y.tail(ni) = *abs_k_ * p2 + 2.0 * wf.cwiseProduct(p2) + rho_ * bracket;
  return y;
}

namespace {

// Stacked (phi1; phi2) <-> interleaved bordered layout.
Eigen::VectorXd to_bordered(const Eigen::VectorXd& b) {
  const Index ni = b.size() / 2;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(b.size() + 1);
  for (Index i = 0; i < ni; ++i) {
    r[2 * i] = b[i];
    r[2 * i + 1] = b[ni + i];
  }
  return r;
}

Eigen::VectorXd from_bordered(const Eigen::VectorXd& y) {
  const Index ni = (y.size() - 1) / 2;
  Eigen::VectorXd x(2 * ni);
  for (Index i = 0; i < ni; ++i) {
    x[i] = y[2 * i];
    x[ni + i] = y[2 * i + 1];
  }
  return x;
}

}  // namespace

Eigen::VectorXd LinearizedOperator::solve_weak(const Eigen::VectorXd& data) const {
  // The problem lives on the symmetric subspace; rounding noise in the data
  // outside it would otherwise set a floor on the residual.
  const Eigen::VectorXd b = project(data);
  // normwise backward error |b - A x| / (| |A| |x| | + |b|)
  auto backward_error = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
    const double scale = apply_weak_abs(x).norm() + b.norm();
    return scale > 0.0 ? r.norm() / scale : 0.0;
  };
  Eigen::VectorXd x = project(from_bordered(lu_->solve(to_bordered(b))));
  Eigen::VectorXd r = b - apply_weak(x);
  double err = backward_error(x, r);
  // iterative refinement while it keeps paying off
  for (int step = 0; step < 4 && err > 1e-13; ++step) {
    const Eigen::VectorXd y = project(x + from_bordered(lu_->solve(to_bordered(r))));
    const Eigen::VectorXd ry = b - apply_weak(y);
    const double ey = backward_error(y, ry);
    if (!(ey < err)) break;
    x = y;
    r = ry;
    err = ey;
  }
  last_residual_ = err;
  if (!std::isfinite(last_residual_) || last_residual_ > 1e-9) {
    throw SolverError("linearized solve did not reach the residual target", {last_residual_});
  }
  return x;
}

Eigen::VectorXd LinearizedOperator::solve_weak_transpose(const Eigen::VectorXd& b) const {
  return project(from_bordered(lu_->transpose().solve(to_bordered(b))));
}

FieldPair LinearizedOperator::apply(const FieldPair& phi) const {
  const Index ni = grid().interior_count();
  Eigen::VectorXd y = apply_weak(stack(phi));
  const Eigen::VectorXd& w = op_.interior_weights();
  y.head(ni) = y.head(ni).cwiseQuotient(w);
  y.tail(ni) = y.tail(ni).cwiseQuotient(w);
  return unstack(y);
}

FieldPair LinearizedOperator::solve(const FieldPair& f) const {
  const Index ni = grid().interior_count();
  Eigen::VectorXd b = stack(f);
  const Eigen::VectorXd& w = op_.interior_weights();
  b.head(ni) = b.head(ni).cwiseProduct(w);
  b.tail(ni) = b.tail(ni).cwiseProduct(w);
  return unstack(solve_weak(b));
}

FieldPair LinearizedOperator::solve_laplacian_form(const FieldPair& h) const {
  // w Delta_h h = -(K h) on interior rows
  const Index ni = grid().interior_count();
  Eigen::VectorXd b(2 * ni);
  b.head(ni) = -(op_.stiffness() * h.first.values).head(ni);
  b.tail(ni) = -(op_.stiffness() * h.second.values).head(ni);
  return unstack(solve_weak(b));
}

namespace {

// H^1_0 norms of both halves of a stacked interior vector.
std::pair<double, double> pair_h10(const SparseOperator& op, const Eigen::VectorXd& x) {
  const Index ni = op.grid().interior_count();
  const SparseMatrix& k = op.interior_block();
  const auto a = x.head(ni);
  const auto b = x.tail(ni);
  return {std::sqrt(std::max(0.0, a.dot(k * a))), std::sqrt(std::max(0.0, b.dot(k * b)))};
}

}  // namespace

NormProbe norm_probe(const std::vector<LinearizedOperator>& ops, const ProbeOptions& opt) {
  if (ops.size() < 2) throw ArgumentError("norm probe needs at least two operators");
  if (opt.trials < 1 || opt.power_steps < 0) throw ArgumentError("invalid norm probe options");
  NormProbe probe;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  for (const LinearizedOperator& L : ops) {
    const SparseOperator& op = L.laplacian();
    const Index ni = L.grid().interior_count();
    const SparseMatrix& k = op.interior_block();
    auto stiff = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd y(2 * ni);
      y.head(ni) = k * x.head(ni);
      y.tail(ni) = k * x.tail(ni);
      return y;
    };
    auto kproject = [&](const Eigen::VectorXd& x) {
      if (L.symmetry() <= 1) return x;
      Eigen::VectorXd full = Eigen::VectorXd::Zero(L.grid().size());
      Eigen::VectorXd out(x.size());
      for (int c = 0; c < 2; ++c) {
        full.head(ni) = x.segment(c * ni, ni);
        out.segment(c * ni, ni) = symmetrize(L.grid(), full, L.symmetry()).head(ni);
      }
      return out;
    };
    // T h = A^{-1} (-K h); T^* y = -A^{-T} K y in the K inner product.
    auto forward = [&](const Eigen::VectorXd& h) { return L.solve_weak(-stiff(h)); };
    auto adjoint = [&](const Eigen::VectorXd& y) { return kproject(L.solve_weak_transpose(-stiff(y))); };
    auto knorm = [&](const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(stiff(x)))); };

    double best = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      Eigen::VectorXd h(2 * ni);
      for (Index i = 0; i < h.size(); ++i) h[i] = normal(rng);
      h = kproject(h);
      h /= knorm(h);
      for (int s = 0; s < opt.power_steps; ++s) {
        Eigen::VectorXd next = adjoint(forward(h));
        const double nn = knorm(next);
        if (!(nn > 0.0) || !std::isfinite(nn)) break;
        h = next / nn;
      }
      const Eigen::VectorXd phi = forward(h);
      const auto [p1, p2] = pair_h10(op, phi);
      const auto [h1, h2] = pair_h10(op, h);
      const double ratio = (p1 + p2) / (h1 + h2);
      probe.samples.push_back({L.lambda(), t, ratio});
      best = std::max(best, ratio);
    }
    probe.lambda.push_back(L.lambda());
    probe.max_ratio.push_back(best);
  }
  std::vector<double> abs_log;
  for (double l : probe.lambda) abs_log.push_back(std::abs(std::log(l)));
  probe.log_fit = fit_line(abs_log, probe.max_ratio);
  // walk from large to small lambda
  std::vector<std::size_t> order(probe.lambda.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probe.lambda[a] > probe.lambda[b]; });
  double running = 0.0;
  for (std::size_t i : order) {
    const double v = probe.max_ratio[i];
    if (running > 0.0) probe.max_relative_drop = std::max(probe.max_relative_drop, (running - v) / running);
    running = std::max(running, v);
  }
  return probe;
}

}  // namespace toda
