#include "toda/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "toda/error.hpp"
#include "toda/meanfield.hpp"

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

// Minimizes sum_i omega_i (y_i - c - model(r_i, delta))^2 over c and log delta.
double refit_scale(const Grid& grid, const Eigen::VectorXd& y, double guess, double r_max,
                   double (*model)(double r, double delta)) {
  std::vector<Index> nodes;
  std::vector<double> omega;
  const double h = grid.min_spacing();
  for (Index i = 0; i < grid.size(); ++i) {
    const double r = norm(grid.node(i));
    if (r > r_max) continue;
    nodes.push_back(i);
    omega.push_back(grid.weights()[i] / (r * r + h * h));
  }
  if (nodes.size() < 3) throw ArgumentError("too few nodes for the scale refit");
  auto cost = [&](double log_delta) {
    const double d = std::exp(log_delta);
    double sw = 0.0;
    double sr = 0.0;
    std::vector<double> res(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      res[j] = y[nodes[j]] - model(norm(grid.node(nodes[j])), d);
      sw += omega[j];
      sr += omega[j] * res[j];
    }
    const double c = sr / sw;
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += omega[j] * (res[j] - c) * (res[j] - c);
    return s;
  };
  const double lg = std::log(guess);
  const auto best = boost::math::tools::brent_find_minima(cost, lg - std::log(20.0), lg + std::log(20.0), 40);
  return std::exp(best.first);
}

double model1(double r, double d) { return -std::log(d * d + r * r); }
double model2(double r, double d) { return -std::log(std::pow(d, 4) + std::pow(r, 4)); }

}  // namespace

FieldPair change_of_variables(const FieldPair& u) {
  return {ScalarField(u.first.grid, (2.0 * u.first.values + u.second.values) / 3.0),
          ScalarField(u.first.grid, (u.first.values + 2.0 * u.second.values) / 3.0)};
}

FieldPair inverse_change_of_variables(const FieldPair& v) {
  return {ScalarField(v.first.grid, 2.0 * v.first.values - v.second.values),
          ScalarField(v.first.grid, 2.0 * v.second.values - v.first.values)};
}

Eigen::VectorXd ball_indicator(const Grid& grid, double r) {
  const double width = grid.local_spacing(r);
  Eigen::VectorXd chi(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double t = (norm(grid.node(i)) - r) / width;
    chi[i] = std::clamp(0.5 - t, 0.0, 1.0);
  }
  return chi;
}

MassReport local_masses(const SolveReport& rep, const MeanFieldSolution& mf,
                        const std::vector<double>& radii) {
  if (!rep.converged) throw ArgumentError("local masses need a converged solve");
  const Grid& g = *rep.u.first.grid;
  const double rin = inradius(g.domain());
  const ExpTerms t = exp_terms(g, rep.u.first.values, rep.u.second.values, rep.lambda);
  const Eigen::VectorXd ez = mf.z.values.array().exp().matrix();
  const double iz = integrate(g, ez);
  const Disk* disk = std::get_if<Disk>(&g.domain().shape);

  MassReport m;
  m.lambda = rep.lambda;
  m.rho = rep.rho;
  m.radii = radii;
  for (double r : radii) {
    if (!(r > 0.0) || r > rin) throw ArgumentError("ball radius must lie in (0, inradius]");
    const Eigen::VectorXd chi = ball_indicator(g, r);
    const double s1 = rep.rho * integrate(g, chi.cwiseProduct(t.g1));
    const double s2 = integrate(g, chi.cwiseProduct(t.f2));
    const double frac = disk ? DiskMeanField(disk->radius, rep.rho).ball_fraction(r)
                             : integrate(g, chi.cwiseProduct(ez)) / iz;
    const double pred = 4.0 * kPi + (rep.rho - 4.0 * kPi) * frac;
    m.sigma1.push_back(s1);
    m.sigma2.push_back(s2);
    m.sigma1_predicted.push_back(pred);
    m.sigma1_deviation.push_back(std::abs(s1 - pred) / pred);
    m.sigma2_deviation.push_back(std::abs(s2 - 8.0 * kPi) / (8.0 * kPi));
  }
  m.rho2 = integrate(g, t.f2);
  m.rho2_deviation = std::abs(m.rho2 - 8.0 * kPi) / (8.0 * kPi);
  return m;
}

ProfileReport profile_check(const SolveReport& rep, const AnsatzBundle& b) {
  if (!rep.converged) throw ArgumentError("profile check needs a converged solve");
  if (rep.lambda != b.lambda) throw ArgumentError("solve and ansatz refer to different lambda");
  const Grid& g = b.op.grid();
  ProfileReport p;
  p.lambda = rep.lambda;
  p.v = change_of_variables(rep.u);
  const Eigen::VectorXd& hf = b.h_field.values;
  const Eigen::VectorXd& z = b.mf->z.values;
  Eigen::VectorXd m1(g.size());
  Eigen::VectorXd m2(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double r = norm(g.node(i));
    m1[i] = model1(r, b.delta1) + 4.0 * kPi * hf[i] + 0.5 * z[i];
    m2[i] = model2(r, b.delta2) + 8.0 * kPi * hf[i];
  }
  p.deviation1 = std::sqrt(b.op.energy(p.v.first.values - m1));
  p.deviation2 = std::sqrt(b.op.energy(p.v.second.values - m2));

  const double r_max = 0.5 * inradius(g.domain());
  const Eigen::VectorXd y1 = p.v.first.values - 4.0 * kPi * hf - 0.5 * z;
  const Eigen::VectorXd y2 = p.v.second.values - 8.0 * kPi * hf;
  p.delta1_fit = refit_scale(g, y1, b.delta1, r_max, model1);
  p.delta2_fit = refit_scale(g, y2, b.delta2, r_max, model2);
  return p;
}

ScalingFit fit_scalings(const std::vector<ProfileReport>& profiles) {
  std::vector<double> lam;
  std::vector<double> d1;
  std::vector<double> d2;
  for (const ProfileReport& p : profiles) {
    lam.push_back(p.lambda);
    d1.push_back(p.delta1_fit);
    d2.push_back(p.delta2_fit);
  }
  return {fit_power_law(lam, d1), fit_power_law(lam, d2)};
}

}  // namespace toda
