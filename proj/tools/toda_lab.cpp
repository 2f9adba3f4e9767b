// toda_lab: runs one stage of the blow-up construction from an INI config and
// writes CSV tables, JSON summaries and a manifest into the output directory.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toda/acceptance.hpp"
#include "toda/ansatz.hpp"
#include "toda/config.hpp"
#include "toda/corrector.hpp"
#include "toda/diagnostics.hpp"
#include "toda/error.hpp"
#include "toda/linearized.hpp"
#include "toda/meanfield.hpp"
#include "toda/report.hpp"

namespace fs = std::filesystem;
using namespace toda;

namespace {

struct Output {
  fs::path dir;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }
};

std::string error_type(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const ArgumentError*>(&e)) return "ArgumentError";
  if (dynamic_cast<const ResolutionError*>(&e)) return "ResolutionError";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
  return "Error";
}

Json error_json(const std::string& subcommand, const Error& e) {
  Json j = {{"subcommand", subcommand}, {"type", error_type(e)}, {"message", e.what()}};
  if (auto* r = dynamic_cast<const ResolutionError*>(&e)) j["min_admissible_lambda"] = round15(r->min_admissible_lambda());
  return {{"error", j}};
}

SparseOperator make_operator(const RunConfig& cfg) {
  return assemble_laplacian(build_grid(cfg.domain, cfg.resolution(), cfg.delta_min));
}

void write_pair(Output& out, const std::string& stem, const FieldPair& f) {
  write_field_csv(out.path(stem + "1.csv"), stem + "1", f.first);
  write_field_csv(out.path(stem + "2.csv"), stem + "2", f.second);
}

CsvTable residual_table(const std::vector<ResidualReport>& reps) {
  CsvTable t;
  t.header = {"lambda", "delta1", "delta2", "p", "e1_norm", "e2_norm", "r1_norm", "r2_norm"};
  for (const ResidualReport& r : reps)
    for (std::size_t i = 0; i < r.p.size(); ++i)
      t.rows.push_back({r.lambda, r.delta1, r.delta2, r.p[i], r.e1_norm[i], r.e2_norm[i], r.r1_norm[i], r.r2_norm[i]});
  return t;
}

int run_meanfield(const RunConfig& cfg, Output& out) {
  const SparseOperator op = make_operator(cfg);
  MeanFieldSolution sol = solve_meanfield(op, cfg.rho());
  certify_nondegeneracy(op, sol, cfg.domain.symmetry_order);
  write_field_csv(out.path("z.csv"), "z", sol.z);
  write_json(out.path("meanfield.json"), to_json(sol));
  std::printf("rho = %.6g: int e^z = %.10g, z(0) = %.10g, residual %.3e after %d steps\n", sol.rho,
              sol.mass_integral, sol.z_at_origin, sol.residual, sol.iterations);
  return 0;
}

int run_ansatz(const RunConfig& cfg, Output& out) {
  const Background bg = make_background(make_operator(cfg), cfg.rho());
  std::vector<ResidualReport> reps;
  Json rows = Json::array();
  for (double lambda : cfg.lambdas()) {
    reps.push_back(residual(assemble_ansatz(bg, lambda), cfg.p_grid));
    rows.push_back(to_json(reps.back()));
  }
  const RateFits fits = fit_rates(reps);
  const AnsatzBundle b = assemble_ansatz(bg, cfg.solve_lambda);
  write_field_csv(out.path("W1.csv"), "W1", b.w1);
  write_field_csv(out.path("W2.csv"), "W2", b.w2);
  write_pair(out, "R", residual_fields(b));
  write_csv(out.path("residuals.csv"), residual_table(reps));
  write_json(out.path("ansatz.json"), {{"reports", rows}, {"fits", to_json(fits)}});
  std::printf("log-log slopes: E1 %.4f, E2 %.4f, R %.4f\n", fits.e1.slope, fits.e2.slope, fits.r.slope);
  return 0;
}

int run_linprobe(const RunConfig& cfg, Output& out) {
  const Background bg = make_background(make_operator(cfg), cfg.rho());
  const ProbeOptions opt{cfg.probe_trials, cfg.probe_power_steps, cfg.seed};
  std::vector<LinearizedOperator> ops, control;
  for (double lambda : cfg.lambdas()) {
    const AnsatzBundle b = assemble_ansatz(bg, lambda);
    ops.push_back(assemble_linearized(b));
    // without the k-fold symmetry the kernel of the bubbles is not removed
    control.push_back(assemble_linearized(b.op, b.w1.values, b.w2.values, lambda, b.rho, 1));
  }
  const NormProbe probe = norm_probe(ops, opt);
  const NormProbe unsym = norm_probe(control, opt);
  CsvTable t;
  t.header = {"lambda", "trial", "ratio", "symmetric"};
  for (const ProbeSample& s : probe.samples) t.rows.push_back({s.lambda, double(s.trial), s.ratio, 1.0});
  for (const ProbeSample& s : unsym.samples) t.rows.push_back({s.lambda, double(s.trial), s.ratio, 0.0});
  write_csv(out.path("probe.csv"), t);
  write_json(out.path("linprobe.json"), {{"symmetric", to_json(probe)}, {"control_k1", to_json(unsym)}});
  std::printf("max ratio %.4g -> %.4g (slope in |log lambda| %.4f); k = 1 control %.4g -> %.4g\n",
              probe.max_ratio.front(), probe.max_ratio.back(), probe.log_fit.slope, unsym.max_ratio.front(),
              unsym.max_ratio.back());
  return 0;
}

int run_solve(const RunConfig& cfg, Output& out) {
  const Background bg = make_background(make_operator(cfg), cfg.rho());
  CorrectorOptions opt;
  opt.epsilon = cfg.epsilon;
  const SolveReport rep = newton_correct(assemble_ansatz(bg, cfg.solve_lambda), opt);
  write_pair(out, "phi", rep.phi);
  write_pair(out, "u", rep.u);
  CsvTable trace;
  trace.header = {"iteration", "residual", "increment", "damping"};
  for (std::size_t i = 0; i < rep.trace.size(); ++i)
    trace.rows.push_back({double(i + 1), rep.trace[i].residual, rep.trace[i].increment, rep.trace[i].damping});
  write_csv(out.path("newton.csv"), trace);
  write_json(out.path("solve.json"), to_json(rep));
  std::printf("lambda = %.6g: ||phi|| = %.6g (bound %.6g), residual %.3e after %d steps\n", rep.lambda,
              rep.phi_norm, rep.bound, rep.residual, rep.iterations);
  return 0;
}

int run_sweep(const RunConfig& cfg, Output& out) {
  const Background bg = make_background(make_operator(cfg), cfg.rho());
  CorrectorOptions opt;
  opt.epsilon = cfg.epsilon;
  const SweepReport s = sweep(bg, cfg.lambdas(), opt);
  Json masses = Json::array(), profiles = Json::array();
  std::vector<ProfileReport> prof;
  CsvTable t;
  t.header = {"lambda", "delta1", "delta2", "phi_norm", "bound", "residual", "iterations", "rho2",
              "deviation1", "deviation2", "delta1_fit", "delta2_fit"};
  for (const SolveReport& rep : s.reports) {
    const MassReport m = local_masses(rep, *bg.mf, cfg.radii);
    prof.push_back(profile_check(rep, assemble_ansatz(bg, rep.lambda)));
    const ProfileReport& p = prof.back();
    masses.push_back(to_json(m));
    profiles.push_back(to_json(p));
    t.rows.push_back({rep.lambda, rep.delta1, rep.delta2, rep.phi_norm, rep.bound, rep.residual,
                      double(rep.iterations), m.rho2, p.deviation1, p.deviation2, p.delta1_fit, p.delta2_fit});
  }
  Json summary = {{"sweep", to_json(s)}, {"masses", masses}, {"profiles", profiles}};
  if (prof.size() >= 3) summary["scalings"] = to_json(fit_scalings(prof));
  write_csv(out.path("sweep.csv"), t);
  write_json(out.path("sweep.json"), summary);
  std::printf("%zu of %zu lambda values solved", s.reports.size(), cfg.lambdas().size());
  if (s.fit) std::printf(", ||phi|| slope %.4f", s.fit->slope);
  std::printf("\n");
  if (s.truncated) std::fprintf(stderr, "sweep stopped at lambda = %.6g: %s\n", s.failed_lambda, s.failure.c_str());
  return s.truncated ? 1 : 0;
}

int run_verify(const RunConfig& cfg, Output& out) {
  AcceptanceSuite suite(cfg);
  const std::vector<CriterionResult> results = suite.run_all();
  std::string table;
  bool all = true;
  for (const CriterionResult& r : results) {
    table += format_row(r) + "\n";
    all = all && r.pass;
  }
  std::cout << table;
  write_text(out.path("verify.txt"), table);
  write_json(out.path("summary.json"), summary_json(results, cfg));
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric blow-up solutions of the SU(3) Toda system"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "random seed (overrides run.seed)");

  using Runner = int (*)(const RunConfig&, Output&);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
      {"meanfield", "solve the mean-field equation", run_meanfield},
      {"ansatz", "assemble the approximate solution and report its residuals", run_ansatz},
      {"linprobe", "probe the inverse of the linearized operator", run_linprobe},
      {"solve", "correct the ansatz at one lambda", run_solve},
      {"sweep", "solve along the lambda schedule with mass and profile diagnostics", run_sweep},
      {"verify", "run the acceptance checks", run_verify},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();
  CLI11_PARSE(app, argc, argv);

  std::string name;
  Runner fn = nullptr;
  for (const auto& [n, help, f] : commands)
    if (app.got_subcommand(n)) name = n, fn = f;

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    validate(cfg);
  } catch (const Error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  }

  Output out{cfg.out_dir, {}};
  try {
    fs::create_directories(out.dir);
    const int status = fn(cfg, out);
    write_json((out.dir / "manifest.json").string(), make_manifest(name, cfg, out.files));
    return status;
  } catch (const Error& e) {
    std::cerr << name << ": " << error_type(e) << ": " << e.what() << "\n";
    try {
      out.files.push_back("error.json");
      write_json((out.dir / "error.json").string(), error_json(name, e));
      write_json((out.dir / "manifest.json").string(), make_manifest(name, cfg, out.files));
    } catch (const std::exception&) {
    }
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return 3;
  }
}
