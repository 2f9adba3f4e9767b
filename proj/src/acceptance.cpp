#include "toda/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "toda/bubbles.hpp"
#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::shared_ptr<const Grid> uniform_disk(double radius, int n_r, int n_theta) {
  PolarResolution res{n_r, n_theta, 0.0};
  return build_grid({Disk{radius}, 4}, res, 1.0);
}

}  // namespace

struct AcceptanceSuite::Cache {
  std::optional<SparseOperator> op;
  std::optional<Background> background;
  std::optional<SweepReport> sweep;
};

AcceptanceSuite::AcceptanceSuite(RunConfig config) : config_(std::move(config)), cache_(std::make_unique<Cache>()) {
  validate(config_);
}

AcceptanceSuite::~AcceptanceSuite() = default;

CriterionResult AcceptanceSuite::run(int id) {
  if (id < 1 || id > kCriterionCount) {
    throw ArgumentError("criterion id must be 1.." + std::to_string(kCriterionCount));
  }
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  r.id = id;
  const RunConfig& cfg = config_;
  Cache& cache = *cache_;

  auto background = [&]() -> const Background& {
    if (!cache.background) {
      cache.op = assemble_laplacian(build_grid(cfg.domain, cfg.resolution(), cfg.delta_min));
      cache.background = make_background(*cache.op, cfg.rho());
    }
    return *cache.background;
  };
  auto sweep_report = [&]() -> const SweepReport& {
    if (!cache.sweep) {
      CorrectorOptions opt;
      opt.epsilon = cfg.epsilon;
      cache.sweep = sweep(background(), cfg.lambdas(), opt);
    }
    return *cache.sweep;
  };

  try {
    switch (id) {
      case 1: {
        r.title = "quantization";
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        Json triples = Json::array();
        for (int i = 0; i < 20; ++i) {
          const double alpha = unit(rng) < 0.5 ? 2.0 : 4.0;
          const double delta = std::pow(10.0, -3.0 + 3.0 * unit(rng));
          const double R = delta * std::pow(10.0, -1.0 + 4.0 * unit(rng));
          const BubbleMass m = bubble_mass({alpha, delta}, R);
          const double rel = std::abs(m.quadrature - m.closed_form) / m.closed_form;
          worst = std::max(worst, rel);
          triples.push_back({{"alpha", alpha}, {"delta", round15(delta)}, {"R", round15(R)},
                             {"quadrature", round15(m.quadrature)}, {"closed_form", round15(m.closed_form)}});
        }
        double limit_dev = 0.0;
        for (double alpha : {2.0, 4.0}) {
          const double delta = 0.01;
          const BubbleMass m = bubble_mass({alpha, delta}, 100.0 * delta);
          limit_dev = std::max(limit_dev, std::abs(m.quadrature - 4.0 * kPi * alpha) / (4.0 * kPi * alpha));
        }
        r.pass = worst <= 1e-6 && limit_dev <= 0.01;
        r.summary = fmt("max rel. mass error %.2e (<= 1e-6)", worst) + fmt(", limit deviation %.2e (<= 1e-2)", limit_dev);
        r.data = {{"max_relative_error", round15(worst)}, {"limit_deviation", round15(limit_dev)}, {"triples", triples}};
        break;
      }
      case 2: {
        r.title = "weighted identities";
        bool ok = true;
        double worst = 0.0;
        Json rows = Json::array();
        for (double alpha : {2.0, 4.0}) {
          const WeightedIdentities w = weighted_identities(alpha);
          Json row = {{"alpha", alpha}};
          std::vector<double> dev;
          for (int j = 0; j < 3; ++j) {
            const double d = std::abs(w.values[j] - w.stated[j]);
            dev.push_back(d);
            worst = std::max(worst, d);
            ok = ok && d <= 1e-4;
          }
          row["computed"] = round15({w.values[0], w.values[1], w.values[2]});
          row["target"] = round15({w.stated[0], w.stated[1], w.stated[2]});
          row["closed_form"] = round15({w.closed_form[0], w.closed_form[1], w.closed_form[2]});
          row["deviation"] = round15(dev);
          rows.push_back(row);
        }
        r.pass = ok;
        r.summary = fmt("max |computed - target| %.3e (<= 1e-4)", worst);
        if (!ok) r.summary += "; third identity evaluates to -2 pi/alpha^2";
        r.data = {{"alpha", rows}};
        break;
      }
      case 3: {
        r.title = "mean-field oracle";
        const double rho = 6.0 * kPi;
        const DiskMeanField exact(1.0, rho);
        std::vector<double> err;
        double mass_rel = 0.0;
        double residual = 0.0;
        for (int n : {128, 256}) {
          const SparseOperator op = assemble_laplacian(uniform_disk(1.0, n, 16));
          const MeanFieldSolution s = solve_meanfield(op, rho);
          double e = 0.0;
          for (Index i = 0; i < op.grid().size(); ++i) {
            e = std::max(e, std::abs(s.z[i] - exact.z(norm(op.grid().node(i)))));
          }
          err.push_back(e);
          if (n == 128) {
            mass_rel = std::abs(s.mass_integral - 2.0 * kPi) / (2.0 * kPi);
            residual = s.residual;
          }
        }
        const double ratio = err[0] / err[1];
        r.pass = err[0] <= 5e-4 && ratio >= 3.5 && ratio <= 4.5 && mass_rel <= 1e-3;
        r.summary = fmt("max error %.3e (<= 5e-4)", err[0]) + fmt(", ratio %.3f in [3.5,4.5]", ratio) +
                    fmt(", mass rel. error %.2e (<= 1e-3)", mass_rel);
        r.data = {{"max_error", round15(err)}, {"n_r", {128, 256}}, {"ratio", round15(ratio)},
                  {"mass_relative_error", round15(mass_rel)}, {"residual", round15(residual)}};
        break;
      }
      case 4: {
        r.title = "Green's regular part";
        const SparseOperator unit = assemble_laplacian(uniform_disk(1.0, 128, 16));
        const double sup = green_regular_part(unit, Point{}).field.values.cwiseAbs().maxCoeff();
        double worst = 0.0;
        Json rows = Json::array();
        for (double R : {0.5, 2.0, 3.0}) {
          const SparseOperator op = assemble_laplacian(uniform_disk(R, 64, 16));
          const double h00 = green_regular_part(op, Point{}).at_pole;
          const double d = std::abs(h00 - std::log(R) / (2.0 * kPi));
          worst = std::max(worst, d);
          rows.push_back({{"R", R}, {"H00", round15(h00)}, {"deviation", round15(d)}});
        }
        r.pass = sup <= 1e-5 && worst <= 1e-5;
        r.summary = fmt("sup|H(.,0)| on unit disk %.2e", sup) + fmt(", max |H(0,0) - log R/2pi| %.2e (both <= 1e-5)", worst);
        r.data = {{"unit_disk_sup", round15(sup)}, {"radius_R", rows}};
        break;
      }
      case 5: {
        r.title = "projection expansion";
        bool ok = true;
        Json rows = Json::array();
        std::vector<std::pair<std::string, SparseOperator>> ops;
        ops.emplace_back("disk", assemble_laplacian(build_grid({Disk{1.0}, 4}, PolarResolution{160, 16, {}}, 0.05)));
        ops.emplace_back("square", assemble_laplacian(build_grid({Square{2.0}, 4}, CartesianResolution{1.0 / 32.0}, 0.1)));
        double lo = 1e300;
        double hi = 0.0;
        for (const auto& [name, op] : ops) {
          const ScalarField h0 = green_regular_part(op, Point{}).field;
          for (double alpha : {2.0, 4.0}) {
            const double d0 = 0.2;
            const BubbleParams p1{alpha, d0};
            const BubbleParams p2{alpha, d0 / 2.0};
            const double e1 = expansion_deviation(op, p1, projected_bubble(op, p1), h0);
            const double e2 = expansion_deviation(op, p2, projected_bubble(op, p2), h0);
            const double q = e1 / e2;
            const double scaled = q / std::pow(2.0, alpha);
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
            ok = ok && scaled >= 0.7 && scaled <= 1.4;
            rows.push_back({{"domain", name}, {"alpha", alpha}, {"deviation", round15({e1, e2})},
                            {"ratio", round15(q)}});
          }
        }
        r.pass = ok;
        r.summary = fmt("ratio / 2^alpha in [%.4f, ", lo) + fmt("%.4f] (need [0.7, 1.4])", hi);
        r.data = {{"cases", rows}};
        break;
      }
      case 6: {
        r.title = "residual rates";
        const Background& bg = background();
        std::vector<ResidualReport> reps;
        Json rows = Json::array();
        for (double lambda : cfg.lambdas()) {
          reps.push_back(residual(assemble_ansatz(bg, lambda), cfg.p_grid));
          rows.push_back(to_json(reps.back()));
        }
        const RateFits f = fit_rates(reps);
        const bool r_ok = f.r.slope >= 0.20 && f.r.slope <= 0.30 && f.r.r_squared >= 0.98;
        const bool e1_ok = std::abs(f.e1.slope - 0.5) <= 0.05;
        const bool e2_ok = std::abs(f.e2.slope - 0.25) <= 0.05;
        r.pass = r_ok && e1_ok && e2_ok;
        r.summary = fmt("slopes R %.3f [0.20,0.30]", f.r.slope) + fmt(" (R^2 %.4f >= 0.98)", f.r.r_squared) +
                    fmt(", E1 %.3f [0.45,0.55]", f.e1.slope) + fmt(", E2 %.3f [0.20,0.30]", f.e2.slope);
        r.data = {{"fits", to_json(f)}, {"reports", rows}};
        break;
      }
      case 7: {
        r.title = "linearized bound";
        const Background& bg = background();
        std::vector<LinearizedOperator> ops;
        for (double lambda : cfg.lambdas()) ops.push_back(assemble_linearized(assemble_ansatz(bg, lambda)));
        const NormProbe probe = norm_probe(ops, {cfg.probe_trials, cfg.probe_power_steps, cfg.seed});
        const double rel = probe.log_fit.max_abs_residual / probe.log_fit.data_range;
        bool kernel_ok = true;
        Json kernels = Json::array();
        for (double alpha : {2.0, 4.0}) {
          for (int k : {3, 4, 1}) {
            const BubbleKernelReport kr =
                symmetric_kernel_check(alpha, k, cfg.kernel_r_trunc, cfg.kernel, cfg.kernel_threshold);
            const int expected = k == 1 ? 3 : 1;
            kernel_ok = kernel_ok && kr.near_zero_count == expected;
            kernels.push_back({{"alpha", alpha}, {"k", k}, {"count", kr.near_zero_count}, {"expected", expected},
                               {"singular_values", round15(kr.singular_values)},
                               {"mode_residual", round15(kr.mode_residual)}});
          }
        }
        r.pass = rel <= 0.10 && kernel_ok;
        r.summary = fmt("|log lambda| fit residual %.1f%% of range (<= 10%%)", 100.0 * rel) +
                    fmt(", slope %.3f", probe.log_fit.slope) + (kernel_ok ? ", kernel counts 1/1/3 ok" : ", kernel counts wrong");
        r.data = {{"probe", to_json(probe)}, {"kernel", kernels}};
        break;
      }
      case 8: {
        r.title = "correction bound";
        const SweepReport& s = sweep_report();
        const bool all = !s.truncated && s.reports.size() == cfg.lambdas().size();
        int bound_ok = 0;
        for (const SolveReport& rep : s.reports) bound_ok += rep.bound_satisfied ? 1 : 0;
        const double slope = s.fit ? s.fit->slope : std::nan("");
        r.pass = all && bound_ok == static_cast<int>(s.reports.size()) && s.fit && slope >= 0.20;
        r.summary = std::string(all ? "converged at every lambda" : "sweep truncated") + ", bound holds at " +
                    std::to_string(bound_ok) + "/" + std::to_string(s.reports.size()) +
                    fmt(" points, slope %.3f (>= 0.20)", slope);
        r.data = to_json(s);
        break;
      }
      case 9: {
        r.title = "masses";
        const SweepReport& s = sweep_report();
        if (s.reports.empty()) throw Error("sweep produced no solutions");
        std::vector<double> rho2_dev;
        Json rows = Json::array();
        MassReport last;
        for (const SolveReport& rep : s.reports) {
          last = local_masses(rep, *background().mf, {0.3});
          rho2_dev.push_back(std::abs(last.rho2 - 8.0 * kPi));
          rows.push_back(to_json(last));
        }
        const bool at_end = !s.truncated && std::abs(s.reports.back().lambda - cfg.lambda_min) <= 1e-12 * cfg.lambda_min;
        r.pass = at_end && last.sigma2_deviation[0] <= 0.10 && last.sigma1_deviation[0] <= 0.10 &&
                 last.rho2_deviation <= 0.05 && strictly_decreasing(rho2_dev);
        r.summary = fmt("at lambda=%.0e r=0.3: ", s.reports.back().lambda) +
                    fmt("sigma2 dev %.2e, ", last.sigma2_deviation[0]) + fmt("sigma1 dev %.2e (<= 0.1), ", last.sigma1_deviation[0]) +
                    fmt("rho2 dev %.2e (<= 0.05), ", last.rho2_deviation) +
                    (strictly_decreasing(rho2_dev) ? "|rho2 - 8pi| decreasing" : "|rho2 - 8pi| not monotone");
        r.data = {{"masses", rows}};
        break;
      }
      case 10: {
        r.title = "profiles";
        const SweepReport& s = sweep_report();
        std::vector<ProfileReport> profiles;
        std::vector<double> d1;
        std::vector<double> d2;
        Json rows = Json::array();
        for (const SolveReport& rep : s.reports) {
          profiles.push_back(profile_check(rep, assemble_ansatz(background(), rep.lambda)));
          d1.push_back(profiles.back().deviation1);
          d2.push_back(profiles.back().deviation2);
          rows.push_back(to_json(profiles.back()));
        }
        if (profiles.size() < 3) throw Error("too few converged points for the profile check");
        const ScalingFit f = fit_scalings(profiles);
        const bool mono = strictly_decreasing(d1) && strictly_decreasing(d2);
        const bool e1 = f.delta1.slope >= 0.45 && f.delta1.slope <= 0.55;
        const bool e2 = f.delta2.slope >= 0.20 && f.delta2.slope <= 0.30;
        r.pass = mono && e1 && e2 && !s.truncated;
        r.summary = std::string(mono ? "H^1 deviations strictly decreasing" : "H^1 deviations not monotone") +
                    fmt(", delta1 exponent %.4f [0.45,0.55]", f.delta1.slope) +
                    fmt(", delta2 exponent %.4f [0.20,0.30]", f.delta2.slope);
        r.data = {{"profiles", rows}, {"scaling", to_json(f)}};
        break;
      }
      case 11: {
        r.title = "determinism";
        if (first_pass_.empty()) {
          for (int i = 1; i <= 10; ++i) first_pass_.push_back(run(i));
        }
        AcceptanceSuite again(config_);
        std::vector<CriterionResult> second;
        for (int i = 1; i <= 10; ++i) second.push_back(again.run(i));
        const std::string a = dump(summary_json(first_pass_, config_));
        const std::string b = dump(summary_json(second, config_));
        r.pass = a == b;
        r.summary = r.pass ? "two verify passes gave byte-identical JSON (" + std::to_string(a.size()) + " bytes)"
                           : "JSON summaries differ between passes";
        r.data = {{"bytes", a.size()}, {"identical", r.pass}};
        break;
      }
    }
  } catch (const Error& e) {
    r.pass = false;
    r.summary = std::string("error: ") + e.what();
    r.data = {{"error", e.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> AcceptanceSuite::run_all() {
  std::vector<CriterionResult> out;
  for (int i = 1; i <= 10; ++i) out.push_back(run(i));
  first_pass_ = out;
  out.push_back(run(11));
  return out;
}

Json summary_json(const std::vector<CriterionResult>& results, const RunConfig& config) {
  Json rows = Json::array();
  bool all = true;
  for (const CriterionResult& r : results) {
    rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}, {"data", r.data}});
    all = all && r.pass;
  }
  return {{"criteria", rows}, {"all_pass", all}, {"config_hash", config_hash(config)}};
}

std::string format_row(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << ": " << r.summary;
  return os.str();
}

}  // namespace toda
