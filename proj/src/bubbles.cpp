#include "toda/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "toda/error.hpp"
#include "toda/spectral.hpp"

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

void check_resolution(const Grid& grid, const BubbleParams& params) {
  const double guard = 2.0 * grid.min_spacing();
  if (params.delta < guard) {
    throw ResolutionError("bubble scale " + num_text(params.delta) +
                          " is below the resolution guard " + num_text(guard));
  }
}

}  // namespace

void validate(const BubbleParams& params) {
  if (params.alpha != 2.0 && params.alpha != 4.0) {
    throw ArgumentError("bubble alpha must be 2 or 4");
  }
  if (!(params.delta > 0.0) || !std::isfinite(params.delta)) {
    throw ArgumentError("bubble delta must be positive");
  }
}

double bubble_value(const BubbleParams& p, double r) {
  const double a = p.alpha;
  return std::log(2.0 * a * a) + a * std::log(p.delta) -
         2.0 * std::log(std::pow(p.delta, a) + std::pow(r, a));
}

double bubble_value(const BubbleParams& params, Point x) { return bubble_value(params, norm(x)); }

double bubble_density(const BubbleParams& p, double r) {
  const double a = p.alpha;
  const double da = std::pow(p.delta, a);
  const double den = da + std::pow(r, a);
  return 2.0 * a * a * da * std::pow(r, a - 2.0) / (den * den);
}

double z_function(const BubbleParams& p, Point x) {
  const double da = std::pow(p.delta, p.alpha);
  const double ra = std::pow(norm(x), p.alpha);
  return (da - ra) / (da + ra);
}

BubbleMass bubble_mass(const BubbleParams& params, double R) {
  validate(params);
  if (!(R > 0.0)) throw ArgumentError("bubble_mass: R must be positive");
  const double a = params.alpha;
  BubbleMass m;
  const double q = std::pow(params.delta / R, a);
  m.closed_form = 4.0 * kPi * a / (1.0 + q);
  // t = log(r / delta): the density becomes 4 pi a^2 e^{a t} / (1 + e^{a t})^2
  auto f = [a](double t) {
    const double e = std::exp(-a * std::abs(t));
    return 4.0 * kPi * a * a * e / ((1.0 + e) * (1.0 + e));
  };
  const double upper = std::log(R / params.delta);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0;
  m.quadrature = GK::integrate(f, -std::numeric_limits<double>::infinity(), upper, 20, 1e-14, &err);
  m.quadrature_error = err;
  if (std::abs(m.quadrature - m.closed_form) > 1e-6 * m.closed_form) {
    throw SolverError("bubble mass quadrature disagrees with the closed form",
                      {std::abs(m.quadrature - m.closed_form) / m.closed_form});
  }
  return m;
}

Eigen::VectorXd bubble_field(const Grid& grid, const BubbleParams& params) {
  validate(params);
  Eigen::VectorXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = bubble_value(params, grid.node(i));
  return v;
}

ScalarField projected_bubble(const SparseOperator& op, const BubbleParams& params) {
  validate(params);
  check_resolution(op.grid(), params);
  return project_P(op, ScalarField(op.grid_ptr(), bubble_field(op.grid(), params)));
}

double expansion_deviation(const SparseOperator& op, const BubbleParams& params,
                           const ScalarField& pw, const ScalarField& h0) {
  const Grid& g = op.grid();
  const double da = std::pow(params.delta, params.alpha);
  double dev = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double model = -2.0 * std::log(da + std::pow(norm(g.node(i)), params.alpha)) +
                         4.0 * kPi * params.alpha * h0[i];
    dev = std::max(dev, std::abs(pw[i] - model));
  }
  return dev;
}

ScalarField projected_Z(const SparseOperator& op, const BubbleParams& params) {
  validate(params);
  check_resolution(op.grid(), params);
  const Grid& g = op.grid();
  Eigen::VectorXd z(g.size());
  for (Index i = 0; i < g.size(); ++i) z[i] = z_function(params, g.node(i));
  return project_P(op, ScalarField(op.grid_ptr(), std::move(z)));
}

double pz_deviation(const BubbleParams& params, const ScalarField& pz) {
  const Grid& g = *pz.grid;
  const double da = std::pow(params.delta, params.alpha);
  double dev = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double model = 2.0 * da / (da + std::pow(norm(g.node(i)), params.alpha));
    dev = std::max(dev, std::abs(pz[i] - model));
  }
  return dev;
}

WeightedIdentities weighted_identities(double alpha) {
  validate(BubbleParams{alpha, 1.0});
  WeightedIdentities out;
  out.alpha = alpha;
  // With t = r^a / (1 + r^a) the weighted integral over the plane becomes
  // (2 pi / a) * int_0^1 (1 - 2t) g dt.
  boost::math::quadrature::tanh_sinh<double> ts;
  const double scale = 2.0 * kPi / alpha;
  auto one_minus = [](double t, double tc) { return t > 0.5 ? tc : 1.0 - t; };
  auto g0 = [&](double t, double) { return 1.0 - 2.0 * t; };
  auto g1 = [&](double t, double tc) { return (1.0 - 2.0 * t) * -std::log(one_minus(t, tc)); };
  auto g2 = [&](double t, double tc) {
    return (1.0 - 2.0 * t) * (std::log(t) - std::log(one_minus(t, tc))) / alpha;
  };
  double err = 0.0;
  double l1 = 0.0;
  out.values[0] = scale * ts.integrate(g0, 0.0, 1.0, 1e-15, &err, &l1);
  out.error_bounds[0] = scale * err + 1e-16;
  out.values[1] = scale * ts.integrate(g1, 0.0, 1.0, 1e-15, &err, &l1);
  out.error_bounds[1] = scale * err + 1e-16;
  out.values[2] = scale * ts.integrate(g2, 0.0, 1.0, 1e-15, &err, &l1);
  out.error_bounds[2] = scale * err + 1e-16;
  out.closed_form = {0.0, -kPi / alpha, -2.0 * kPi / (alpha * alpha)};
  out.stated = {0.0, -kPi / alpha, -kPi / (2.0 * alpha * alpha)};
  return out;
}

BubbleKernelReport symmetric_kernel_check(double alpha, int k, double r_trunc,
                                          const KernelResolution& res, double threshold) {
  validate(BubbleParams{alpha, 1.0});
  if (k != 1 && k < 3) throw ArgumentError("kernel check needs k >= 3 (or k = 1 for the control)");
  if (!(r_trunc >= 20.0)) throw ArgumentError("kernel check needs R_trunc >= 20");
  if (!(threshold > 0.0)) throw ArgumentError("kernel threshold must be positive");

  const DomainSpec spec{Disk{r_trunc}, k >= 3 ? k : 3};
  auto grid = build_grid(spec, PolarResolution{res.n_r, res.n_theta, {}}, 4.0 * res.core_spacing);
  const Index n = grid->size();
  const Index ni = grid->interior_count();
  const Eigen::VectorXd& w = grid->weights();
  auto potential = [alpha](double r) {
    const double ra = std::pow(r, alpha);
    return 2.0 * alpha * alpha * std::pow(r, alpha - 2.0) / ((1.0 + ra) * (1.0 + ra));
  };

  // reduced index: interior orbit label, then one common boundary constant
  std::vector<Index> reduced(static_cast<std::size_t>(n));
  Index m_interior = ni;
  if (k >= 3) {
    Index orbits = 0;
    std::vector<Index> label = orbit_labels(*grid, k, &orbits);
    m_interior = 0;
    for (Index i = 0; i < ni; ++i) m_interior = std::max(m_interior, label[i] + 1);
    for (Index i = 0; i < ni; ++i) reduced[static_cast<std::size_t>(i)] = label[i];
  } else {
    for (Index i = 0; i < ni; ++i) reduced[static_cast<std::size_t>(i)] = i;
  }
  for (Index i = ni; i < n; ++i) reduced[static_cast<std::size_t>(i)] = m_interior;
  const Index m = m_interior + 1;

  std::vector<Eigen::Triplet<double>> trip;
  for (const Edge& e : grid->edges()) {
    const Index a = reduced[static_cast<std::size_t>(e.a)];
    const Index b = reduced[static_cast<std::size_t>(e.b)];
    if (a == b) continue;
    trip.emplace_back(a, a, e.conductance);
    trip.emplace_back(b, b, e.conductance);
    trip.emplace_back(a, b, -e.conductance);
    trip.emplace_back(b, a, -e.conductance);
  }
  SparseMatrix kr(m, m);
  kr.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd mv = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(m);
  for (Index i = 0; i < n; ++i) {
    const Index a = reduced[static_cast<std::size_t>(i)];
    mv[a] += w[i] * potential(norm(grid->node(i)));
    mass[a] += w[i];
  }

  BubbleKernelReport rep;
  rep.alpha = alpha;
  rep.k = k;
  rep.r_trunc = r_trunc;
  rep.threshold = threshold;
  rep.unknowns = m;

  // residual of (1 - r^a)/(1 + r^a), evaluated orbit-wise
  Eigen::VectorXd v0(m);
  for (Index i = 0; i < n; ++i) {
    const double ra = std::pow(norm(grid->node(i)), alpha);
    v0[reduced[static_cast<std::size_t>(i)]] = (1.0 - ra) / (1.0 + ra);
  }
  const Eigen::VectorXd r0 = kr * v0 - mv.cwiseProduct(v0);
  rep.mode_residual = std::sqrt(r0.cwiseAbs2().cwiseQuotient(mass).sum()) /
                      std::sqrt(mass.dot(v0.cwiseAbs2()));

  // shift-invert at mu = 1: C = D (K - M_V)^{-1} D with D = M_V^{1/2}
  SparseMatrix shifted = kr;
  for (Index i = 0; i < m; ++i) shifted.coeffRef(i, i) -= mv[i];
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw SolverError("kernel check: shifted factorization failed");
  const Eigen::VectorXd d = mv.cwiseSqrt();
  BlockMap apply = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y = lu.solve(d.asDiagonal() * x);
    return Eigen::MatrixXd(d.asDiagonal() * y);
  };
  const int wanted = 5;
  RitzPairs rp = dominant_eigenpairs(apply, m, wanted, 12, 1e-9, 400, 0x5eed);
  if (!rp.converged) throw SolverError("kernel check: subspace iteration did not converge");
  for (int j = 0; j < wanted; ++j) {
    const double nu = rp.values[j];
    const double mu = 1.0 + 1.0 / nu;
    rep.eigenvalues.push_back(mu);
    rep.singular_values.push_back(std::abs(mu - 1.0));
    if (std::abs(mu - 1.0) < threshold) ++rep.near_zero_count;
  }
  return rep;
}

}  // namespace toda
