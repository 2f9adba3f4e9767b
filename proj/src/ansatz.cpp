#include "toda/ansatz.hpp"

#include <cmath>
#include <numbers>

#include "toda/bubbles.hpp"
#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Background make_background(const SparseOperator& op, double rho, const MeanFieldOptions& options) {
  Background bg{op, std::make_shared<MeanFieldSolution>(solve_meanfield(op, rho, nullptr, options)),
                green_regular_part(op, Point{})};
  return bg;
}

Deltas compute_deltas(double lambda, double rho, double z0, double mass_integral, double h00) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be positive");
  check_rho(rho);
  if (!(mass_integral > 0.0)) throw ArgumentError("int e^z must be positive");
  Deltas d;
  d.delta1 = 0.125 * std::sqrt((rho - 4.0 * kPi) * lambda / mass_integral) *
             std::exp(6.0 * kPi * h00 + 0.25 * z0);
  d.delta2 = 0.5 * std::pow(lambda, 0.25) * std::exp(3.0 * kPi * h00 - 0.125 * z0);
  return d;
}

Deltas compute_deltas(double lambda, const MeanFieldSolution& mf, double h00) {
  return compute_deltas(lambda, mf.rho, mf.z_at_origin, mf.mass_integral, h00);
}

double lambda_cross(double rho, double z0, double mass_integral, double h00) {
  // delta2 / delta1 = c lambda^{-1/4}
  const Deltas d = compute_deltas(1.0, rho, z0, mass_integral, h00);
  return std::pow(d.delta2 / d.delta1, 4.0);
}

AnsatzBundle assemble_ansatz(const Background& bg, double lambda) {
  const MeanFieldSolution& mf = *bg.mf;
  const Deltas d = compute_deltas(lambda, mf, bg.h.at_pole);
  const Grid& g = bg.op.grid();
  const double guard = 2.0 * g.min_spacing();
  const double small = std::min(d.delta1, d.delta2);
  if (small < guard) {
    // delta1 ~ sqrt(lambda): the guard is met from lambda * (guard / delta1)^2 on
    const double lambda_min = lambda * (guard / small) * (guard / small);
    throw ResolutionError("grid cannot resolve bubble scale " + num_text(small) +
                              "; smallest admissible lambda is " + num_text(lambda_min),
                          lambda_min);
  }
  AnsatzBundle b;
  b.lambda = lambda;
  b.rho = mf.rho;
  b.delta1 = d.delta1;
  b.delta2 = d.delta2;
  b.op = bg.op;
  b.mf = bg.mf;
  b.h_field = bg.h.field;
  b.h00 = bg.h.at_pole;
  b.pw1 = projected_bubble(bg.op, {2.0, d.delta1});
  b.pw2 = projected_bubble(bg.op, {4.0, d.delta2});
  const Eigen::VectorXd& z = mf.z.values;
  Eigen::VectorXd w1 = b.pw1.values - 0.5 * b.pw2.values + z;
  Eigen::VectorXd w2 = b.pw2.values - 0.5 * b.pw1.values - 0.5 * z;
  if (g.rotation_invariant()) {
    w1 = symmetrize(g, w1, g.symmetry_order());
    w2 = symmetrize(g, w2, g.symmetry_order());
  }
  w1.tail(g.boundary_count()).setZero();
  w2.tail(g.boundary_count()).setZero();
  b.w1 = ScalarField(bg.op.grid_ptr(), std::move(w1));
  b.w2 = ScalarField(bg.op.grid_ptr(), std::move(w2));
  return b;
}

ExpTerms exp_terms(const Grid& grid, const Eigen::VectorXd& u1, const Eigen::VectorXd& u2,
                   double lambda) {
  ExpTerms t;
  const double m = u1.maxCoeff();
  const Eigen::VectorXd q = (u1.array() - m).exp().matrix();
  const double s = grid.weights().dot(q);
  if (!std::isfinite(m) || !(s > 0.0) || !std::isfinite(s)) {
    throw RangeError("e^{u1} is not integrable on the grid");
  }
  t.g1 = q / s;
  t.integral1 = std::exp(m) * s;
  t.f2 = (u2.array() + std::log(lambda)).exp().matrix();
  if (!t.f2.allFinite() || !t.g1.allFinite()) {
    throw RangeError("exponential overflow: lambda too small for the arithmetic range");
  }
  return t;
}

ErrorFields error_fields(const AnsatzBundle& b) {
  const Grid& g = b.op.grid();
  const MeanFieldSolution& mf = *b.mf;
  const ExpTerms t = exp_terms(g, b.w1.values, b.w2.values, b.lambda);
  const BubbleParams p1{2.0, b.delta1};
  const BubbleParams p2{4.0, b.delta2};
  const Eigen::VectorXd ez = mf.z.values.array().exp().matrix();
  const double iz = integrate(g, ez);
  Eigen::VectorXd e1(g.size());
  Eigen::VectorXd e2(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double r = norm(g.node(i));
    e1[i] = 2.0 * b.rho * t.g1[i] - bubble_density(p1, r) - mf.theta * ez[i] / iz;
    e2[i] = 2.0 * t.f2[i] - bubble_density(p2, r);
  }
  ErrorFields out;
  out.e1 = ScalarField(b.op.grid_ptr(), std::move(e1));
  out.e2 = ScalarField(b.op.grid_ptr(), std::move(e2));
  out.integral_w1 = t.integral1;
  out.integral_w1_predicted = b.rho / (b.rho - 4.0 * kPi) * iz;
  return out;
}

FieldPair residual_fields(const AnsatzBundle& b) {
  const Grid& g = b.op.grid();
  const Index ni = g.interior_count();
  const ExpTerms t = exp_terms(g, b.w1.values, b.w2.values, b.lambda);
  Eigen::VectorXd r1 = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd r2 = Eigen::VectorXd::Zero(g.size());
  r1.head(ni) = -b.op.laplacian(b.w1.values) - 2.0 * b.rho * t.g1.head(ni) + t.f2.head(ni);
  r2.head(ni) = -b.op.laplacian(b.w2.values) - 2.0 * t.f2.head(ni) + b.rho * t.g1.head(ni);
  return {ScalarField(b.op.grid_ptr(), std::move(r1)), ScalarField(b.op.grid_ptr(), std::move(r2))};
}

ResidualReport residual(const AnsatzBundle& b, const std::vector<double>& p_grid) {
  const Grid& g = b.op.grid();
  const ErrorFields e = error_fields(b);
  const FieldPair r = residual_fields(b);
  ResidualReport rep;
  rep.lambda = b.lambda;
  rep.delta1 = b.delta1;
  rep.delta2 = b.delta2;
  rep.p = p_grid;
  for (double p : p_grid) {
    rep.e1_norm.push_back(lp_norm(g, e.e1.values, p));
    rep.e2_norm.push_back(lp_norm(g, e.e2.values, p));
    rep.r1_norm.push_back(lp_norm(g, r.first.values, p));
    rep.r2_norm.push_back(lp_norm(g, r.second.values, p));
  }
  const Index ni = g.interior_count();
  Eigen::VectorXd gap1 = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd gap2 = Eigen::VectorXd::Zero(g.size());
  gap1.head(ni) = r.first.values.head(ni) + e.e1.values.head(ni) - 0.5 * e.e2.values.head(ni);
  gap2.head(ni) = r.second.values.head(ni) + e.e2.values.head(ni) - 0.5 * e.e1.values.head(ni);
  rep.identity_gap1 = lp_norm(g, gap1, 1.0);
  rep.identity_gap2 = lp_norm(g, gap2, 1.0);
  rep.integral_w1 = e.integral_w1;
  rep.integral_w1_predicted = e.integral_w1_predicted;
  return rep;
}

RateFits fit_rates(const std::vector<ResidualReport>& reports) {
  std::vector<double> lam;
  std::vector<double> e1;
  std::vector<double> e2;
  std::vector<double> r;
  for (const ResidualReport& rep : reports) {
    std::size_t j = 0;
    while (j < rep.p.size() && rep.p[j] != 1.0) ++j;
    if (j == rep.p.size()) throw ArgumentError("fit_rates needs p = 1 in the p-grid");
    lam.push_back(rep.lambda);
    e1.push_back(rep.e1_norm[j]);
    e2.push_back(rep.e2_norm[j]);
    r.push_back(rep.r1_norm[j] + rep.r2_norm[j]);
  }
  return {fit_power_law(lam, e1), fit_power_law(lam, e2), fit_power_law(lam, r)};
}

}  // namespace toda
