#include "toda/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "toda/error.hpp"

namespace toda {

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> v = {
      {"domain", "1.0.0"},     {"elliptic", "1.0.0"},   {"bubbles", "1.0.0"},
      {"meanfield", "1.1.0"},  {"ansatz", "1.0.0"},     {"linearized", "1.0.0"},
      {"corrector", "1.0.0"},  {"diagnostics", "1.0.0"}, {"cli", "1.0.0"},
  };
  return v;
}

Json round15(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

Json round15(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(round15(x));
  return a;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const LinearFit& f) {
  return {{"slope", round15(f.slope)},
          {"intercept", round15(f.intercept)},
          {"r_squared", round15(f.r_squared)},
          {"slope_stderr", round15(f.slope_stderr)},
          {"slope_ci95", {round15(f.slope_ci_low), round15(f.slope_ci_high)}},
          {"max_abs_residual", round15(f.max_abs_residual)},
          {"data_range", round15(f.data_range)},
          {"n", f.n}};
}

Json to_json(const MeanFieldSolution& s) {
  Json j = {{"rho", round15(s.rho)},
            {"theta", round15(s.theta)},
            {"mass_integral", round15(s.mass_integral)},
            {"z_at_origin", round15(s.z_at_origin)},
            {"residual", round15(s.residual)},
            {"tolerance", round15(s.tolerance)},
            {"iterations", s.iterations},
            {"residual_history", round15(s.residual_history)},
            {"increment_history", round15(s.increment_history)}};
  j["smallest_singular_value"] = s.smallest_singular_value ? round15(*s.smallest_singular_value) : Json();
  return j;
}

Json to_json(const ResidualReport& r) {
  return {{"lambda", round15(r.lambda)},
          {"delta1", round15(r.delta1)},
          {"delta2", round15(r.delta2)},
          {"p", round15(r.p)},
          {"E1_norm", round15(r.e1_norm)},
          {"E2_norm", round15(r.e2_norm)},
          {"R1_norm", round15(r.r1_norm)},
          {"R2_norm", round15(r.r2_norm)},
          {"identity_gap", {round15(r.identity_gap1), round15(r.identity_gap2)}},
          {"integral_eW1", round15(r.integral_w1)},
          {"integral_eW1_predicted", round15(r.integral_w1_predicted)}};
}

Json to_json(const RateFits& f) { return {{"E1", to_json(f.e1)}, {"E2", to_json(f.e2)}, {"R", to_json(f.r)}}; }

Json to_json(const NormProbe& p) {
  return {{"lambda", round15(p.lambda)},
          {"max_ratio", round15(p.max_ratio)},
          {"log_fit", to_json(p.log_fit)},
          {"max_relative_drop", round15(p.max_relative_drop)},
          {"trials_per_lambda", p.lambda.empty() ? 0 : static_cast<int>(p.samples.size() / p.lambda.size())}};
}

Json to_json(const SolveReport& r) {
  Json trace = Json::array();
  for (const NewtonStep& s : r.trace) {
    trace.push_back({{"residual", round15(s.residual)}, {"increment", round15(s.increment)},
                     {"damping", round15(s.damping)}});
  }
  return {{"lambda", round15(r.lambda)},
          {"rho", round15(r.rho)},
          {"delta1", round15(r.delta1)},
          {"delta2", round15(r.delta2)},
          {"converged", r.converged},
          {"phi_norm", round15(r.phi_norm)},
          {"phi1_norm", round15(r.phi1_norm)},
          {"phi2_norm", round15(r.phi2_norm)},
          {"bound", round15(r.bound)},
          {"bound_margin", round15(r.bound_margin)},
          {"bound_satisfied", r.bound_satisfied},
          {"residual", round15(r.residual)},
          {"initial_residual", round15(r.initial_residual)},
          {"tolerance", round15(r.tolerance)},
          {"inverse_residual", round15(r.inverse_residual)},
          {"iterations", r.iterations},
          {"warm_started", r.warm_started},
          {"trace", trace}};
}

Json to_json(const SweepReport& s) {
  Json reports = Json::array();
  for (const SolveReport& r : s.reports) reports.push_back(to_json(r));
  Json j = {{"reports", reports},
            {"slope_ok", s.slope_ok},
            {"truncated", s.truncated},
            {"failure", s.failure},
            {"failed_lambda", round15(s.failed_lambda)}};
  j["fit"] = s.fit ? to_json(*s.fit) : Json();
  return j;
}

Json to_json(const MassReport& m) {
  return {{"lambda", round15(m.lambda)},
          {"rho", round15(m.rho)},
          {"radii", round15(m.radii)},
          {"sigma1", round15(m.sigma1)},
          {"sigma2", round15(m.sigma2)},
          {"sigma1_predicted", round15(m.sigma1_predicted)},
          {"sigma1_deviation", round15(m.sigma1_deviation)},
          {"sigma2_deviation", round15(m.sigma2_deviation)},
          {"rho2", round15(m.rho2)},
          {"rho2_deviation", round15(m.rho2_deviation)}};
}

Json to_json(const ProfileReport& p) {
  return {{"lambda", round15(p.lambda)},
          {"deviation1", round15(p.deviation1)},
          {"deviation2", round15(p.deviation2)},
          {"delta1_fit", round15(p.delta1_fit)},
          {"delta2_fit", round15(p.delta2_fit)}};
}

Json to_json(const ScalingFit& f) { return {{"delta1", to_json(f.delta1)}, {"delta2", to_json(f.delta2)}}; }

Json to_json(const RunConfig& c) {
  Json j = Json::object();
  const std::string canon = canonical_form(c);
  std::size_t pos = 0;
  while (pos < canon.size()) {
    const std::size_t nl = canon.find('\n', pos);
    const std::string line = canon.substr(pos, nl - pos);
    const std::size_t eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
    pos = nl + 1;
  }
  return j;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << "\n";
  char buf[40];
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, dump(j)); }

Json make_manifest(const std::string& subcommand, const RunConfig& config,
                   const std::vector<std::string>& files) {
  return {{"subcommand", subcommand},
          {"config_hash", config_hash(config)},
          {"config", to_json(config)},
          {"seed", config.seed},
          {"module_versions", module_versions()},
          {"files", files}};
}

}  // namespace toda
