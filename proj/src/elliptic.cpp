#include "toda/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <vector>

#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kLinearTolerance = 1e-10;

}  // namespace

SparseOperator assemble_laplacian(std::shared_ptr<const Grid> grid) {
  if (!grid) throw DomainError("assemble_laplacian: null grid");
  const Index n = grid->size();
  const Index ni = grid->interior_count();
  const Eigen::VectorXd& w = grid->weights();
  for (Index i = 0; i < n; ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw DomainError("degenerate quadrature weight at node " + std::to_string(i));
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid->edges().size() * 4);
  for (const Edge& e : grid->edges()) {
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      throw DomainError("degenerate grid spacing on link " + std::to_string(e.a) + "-" +
                        std::to_string(e.b));
    }
    trip.emplace_back(e.a, e.a, e.conductance);
    trip.emplace_back(e.b, e.b, e.conductance);
    trip.emplace_back(e.a, e.b, -e.conductance);
    trip.emplace_back(e.b, e.a, -e.conductance);
  }
  auto impl = std::make_shared<SparseOperator::Impl>();
  impl->full.resize(n, n);
  impl->full.setFromTriplets(trip.begin(), trip.end());
  impl->interior = impl->full.topLeftCorner(ni, ni);
  impl->coupling = impl->full.topRightCorner(ni, n - ni);
  impl->interior_weights = w.head(ni);
  if (ni < kDirectSolveLimit) {
    impl->direct = std::make_unique<SparseOperator::Direct>(impl->interior);
    if (impl->direct->info() != Eigen::Success) {
      throw SolverError("factorization of the interior Laplacian failed");
    }
  } else {
    impl->iterative = true;
    impl->cg = std::make_unique<SparseOperator::Iterative>();
    impl->cg->setTolerance(kLinearTolerance * 0.1);
    impl->cg->setMaxIterations(static_cast<Index>(20 * std::sqrt(static_cast<double>(ni))) + 200);
    impl->cg->compute(impl->interior);
  }
  SparseOperator op;
  op.grid_ = std::move(grid);
  op.impl_ = std::move(impl);
  return op;
}

Eigen::VectorXd SparseOperator::laplacian(const Eigen::VectorXd& u) const {
  if (u.size() != grid_->size()) throw DomainError("laplacian: field size does not match grid");
  const Index ni = grid_->interior_count();
  Eigen::VectorXd ku = impl_->interior * u.head(ni) + impl_->coupling * u.tail(u.size() - ni);
  return -ku.cwiseQuotient(impl_->interior_weights);
}

Eigen::VectorXd SparseOperator::solve_interior(const Eigen::VectorXd& load) const {
  if (load.size() != grid_->interior_count()) {
    throw DomainError("solve_interior: load size does not match interior count");
  }
  if (!load.allFinite()) throw ArgumentError("solve_interior: non-finite right-hand side");
  const double bnorm = load.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(load.size());
  Eigen::VectorXd x;
  if (impl_->direct) {
    x = impl_->direct->solve(load);
  } else {
    x = impl_->cg->solve(load);
  }
  double rel = (impl_->interior * x - load).norm() / bnorm;
  if (rel > kLinearTolerance && impl_->direct) {
    // one step of iterative refinement
    x += impl_->direct->solve(load - impl_->interior * x);
    rel = (impl_->interior * x - load).norm() / bnorm;
  }
  if (!(rel <= kLinearTolerance)) {
    throw SolverError("Poisson solve did not reach relative residual 1e-10", {rel});
  }
  return x;
}

double SparseOperator::energy(const Eigen::VectorXd& u) const {
  double e = 0.0;
  for (const Edge& edge : grid_->edges()) {
    const double d = u[edge.a] - u[edge.b];
    e += edge.conductance * d * d;
  }
  return e;
}

ScalarField poisson_solve(const SparseOperator& op, const ScalarField& rhs) {
  const Grid& g = op.grid();
  if (rhs.size() != g.size()) throw DomainError("poisson_solve: rhs size does not match grid");
  const Index ni = g.interior_count();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(g.size());
  u.head(ni) = op.solve_interior(rhs.values.head(ni).cwiseProduct(op.interior_weights()));
  return {op.grid_ptr(), std::move(u)};
}

ScalarField harmonic_extension(const SparseOperator& op, const Eigen::VectorXd& boundary_values) {
  const Grid& g = op.grid();
  if (boundary_values.size() != g.boundary_count()) {
    throw DomainError("harmonic_extension: expected one value per boundary node");
  }
  if (!boundary_values.allFinite()) throw ArgumentError("harmonic_extension: non-finite data");
  const Index ni = g.interior_count();
  Eigen::VectorXd u(g.size());
  u.tail(g.boundary_count()) = boundary_values;
  u.head(ni) = op.solve_interior(-(op.coupling_block() * boundary_values));
  return {op.grid_ptr(), std::move(u)};
}

ScalarField project_P(const SparseOperator& op, const ScalarField& u) {
  const Grid& g = op.grid();
  if (u.size() != g.size()) throw DomainError("project_P: field size does not match grid");
  if (!u.values.allFinite()) throw ArgumentError("project_P: non-finite field");
  ScalarField ext = harmonic_extension(op, u.values.tail(g.boundary_count()));
  Eigen::VectorXd pu = u.values - ext.values;
  pu.tail(g.boundary_count()).setZero();
  return {op.grid_ptr(), std::move(pu)};
}

GreenRegular green_regular_part(const SparseOperator& op, Point pole) {
  const Grid& g = op.grid();
  const double margin = boundary_distance(g.domain(), pole);
  if (!(margin > 0.0)) throw DomainError("Green's function pole must lie strictly inside");
  const double scale = 0.5 / std::numbers::pi;
  Eigen::VectorXd data(g.boundary_count());
  for (Index b = 0; b < g.boundary_count(); ++b) {
    const Point x = g.node(g.interior_count() + b);
    data[b] = scale * std::log(std::hypot(x.x - pole.x, x.y - pole.y));
  }
  GreenRegular out;
  out.field = harmonic_extension(op, data);
  out.at_pole = (pole.x == 0.0 && pole.y == 0.0) ? origin_value(g, out.field.values)
                                                 : interpolate(g, out.field.values, pole);
  return out;
}

double lp_norm(const Grid& grid, const Eigen::VectorXd& values, double p) {
  if (!(p >= 1.0)) throw ArgumentError("L^p norm needs p >= 1");
  if (values.size() != grid.size()) throw DomainError("lp_norm: field size does not match grid");
  const Eigen::VectorXd& w = grid.weights();
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Index i = 0; i < values.size(); ++i) s += w[i] * std::pow(std::abs(values[i]), p);
  return std::pow(s, 1.0 / p);
}

double h10_norm(const SparseOperator& op, const Eigen::VectorXd& values) {
  if (values.size() != op.grid().size()) throw DomainError("h10_norm: size mismatch");
  return std::sqrt(op.energy(values));
}

Norms norms(const SparseOperator& op, const ScalarField& f, double p) {
  return {lp_norm(op.grid(), f.values, p), h10_norm(op, f.values)};
}

double integrate(const Grid& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.size()) throw DomainError("integrate: size mismatch");
  return grid.weights().dot(values);
}

double origin_value(const Grid& grid, const Eigen::VectorXd& values) {
  if (const PolarLayout* pl = grid.polar()) {
    double a[3];
    double x[3];
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int j = 0; j < pl->n_theta; ++j) s += values[grid.polar_index(i, j)];
      a[i] = s / pl->n_theta;
      x[i] = pl->ring_radius[i] * pl->ring_radius[i];
    }
    // Lagrange interpolant in r^2 evaluated at 0
    const double l0 = x[1] * x[2] / ((x[0] - x[1]) * (x[0] - x[2]));
    const double l1 = x[0] * x[2] / ((x[1] - x[0]) * (x[1] - x[2]));
    const double l2 = x[0] * x[1] / ((x[2] - x[0]) * (x[2] - x[1]));
    return l0 * a[0] + l1 * a[1] + l2 * a[2];
  }
  return interpolate(grid, values, Point{});
}

double interpolate(const Grid& grid, const Eigen::VectorXd& values, Point p) {
  if (const PolarLayout* pl = grid.polar()) {
    const double r = norm(p);
    if (r > pl->radius * (1.0 + 1e-12)) throw DomainError("interpolation point outside the disk");
    const int nt = pl->n_theta;
    const double dtheta = 2.0 * std::numbers::pi / nt;
    double th = std::atan2(p.y, p.x);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    const double tj = th / dtheta;
    const int j0 = static_cast<int>(std::floor(tj));
    const double fj = tj - j0;
    auto ring_value = [&](int ring) {
      return (1.0 - fj) * values[grid.polar_index(ring, j0)] +
             fj * values[grid.polar_index(ring, j0 + 1)];
    };
    const double t = pl->inverse(r) / pl->ds - 0.5;
    if (t <= 0.0) {
      const double f = r / pl->ring_radius[0];
      return (1.0 - f) * origin_value(grid, values) + f * ring_value(0);
    }
    const int i0 = std::min(static_cast<int>(std::floor(t)), pl->n_r - 2);
    const double fi = std::min(t - i0, 1.0);
    return (1.0 - fi) * ring_value(i0) + fi * ring_value(i0 + 1);
  }
  // Cartesian: bilinear over the four surrounding nodes that exist
  const double h = grid.cartesian_h();
  const double gx = p.x / h;
  const double gy = p.y / h;
  const long i0 = static_cast<long>(std::floor(gx));
  const long j0 = static_cast<long>(std::floor(gy));
  const double fx = gx - static_cast<double>(i0);
  const double fy = gy - static_cast<double>(j0);
  double acc = 0.0;
  double wsum = 0.0;
  const auto& nodes = grid.nodes();
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const long i = std::lround(nodes[n].x / h);
    const long j = std::lround(nodes[n].y / h);
    if ((i != i0 && i != i0 + 1) || (j != j0 && j != j0 + 1)) continue;
    const double wx = i == i0 ? 1.0 - fx : fx;
    const double wy = j == j0 ? 1.0 - fy : fy;
    acc += wx * wy * values[static_cast<Index>(n)];
    wsum += wx * wy;
  }
  if (!(wsum > 0.0)) throw DomainError("interpolation point has no surrounding grid nodes");
  return acc / wsum;
}

void write_field_csv(std::ostream& out, const std::string& name, const ScalarField& field) {
  out << "# field: " << name << "\n";
  out << "x,y,value\n";
  out << std::setprecision(15);
  for (Index i = 0; i < field.size(); ++i) {
    const Point p = field.grid->node(i);
    out << p.x << ',' << p.y << ',' << field.values[i] << '\n';
  }
}

void write_field_csv(const std::string& path, const std::string& name, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_field_csv(out, name, field);
}

}  // namespace toda
