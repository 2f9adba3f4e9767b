#include "toda/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "toda/error.hpp"

namespace toda {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys = {
    {"domain", {"shape", "radius", "side", "polygon", "symmetry"}},
    {"grid", {"kind", "n_r", "n_theta", "grading", "delta_min", "h"}},
    {"model", {"rho_over_pi", "epsilon"}},
    {"sweep", {"lambda_max", "lambda_min", "count", "p", "radii"}},
    {"solve", {"lambda"}},
    {"probe", {"trials", "power_steps"}},
    {"kernel", {"r_trunc", "n_r", "n_theta", "core_spacing", "threshold"}},
    {"run", {"seed", "out"}},
};

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("'" + key + "' has an empty list entry");
    out.push_back(to_double(key, item.substr(first, last - first + 1)));
  }
  if (out.empty()) throw ConfigError("'" + key + "' expects a comma-separated list");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

double RunConfig::rho() const { return rho_over_pi * std::numbers::pi; }

Resolution RunConfig::resolution() const {
  if (grid_kind == GridKind::polar) return polar;
  return cartesian;
}

std::vector<double> RunConfig::lambdas() const {
  std::vector<double> out;
  if (lambda_count == 1) return {lambda_max};
  const double a = std::log(lambda_max);
  const double b = std::log(lambda_min);
  for (int j = 0; j < lambda_count; ++j) out.push_back(std::exp(a + (b - a) * j / (lambda_count - 1)));
  return out;
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end() || body.data().size()) throw ConfigError("unknown config section '" + section + "'");
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
      kv[section + "." + key] = value.data();
    }
  }
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto num = [&](const char* k) { return to_double(k, kv.at(k)); };
  auto integer = [&](const char* k) { return to_integer(k, kv.at(k)); };

  RunConfig c;
  std::string shape = has("domain.shape") ? kv["domain.shape"] : "disk";
  if (has("domain.symmetry")) c.domain.symmetry_order = static_cast<int>(integer("domain.symmetry"));
  if (shape == "disk") {
    c.domain.shape = Disk{has("domain.radius") ? num("domain.radius") : 1.0};
  } else if (shape == "square") {
    c.domain.shape = Square{has("domain.side") ? num("domain.side") : 2.0};
  } else if (shape == "polygon") {
    if (!has("domain.polygon")) throw ConfigError("shape 'polygon' needs domain.polygon");
    std::filesystem::path p(kv["domain.polygon"]);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.polygon_file = kv["domain.polygon"];
    try {
      c.domain.shape = load_polygon(p.string());
    } catch (const Error& e) {
      throw ConfigError(std::string("cannot read polygon: ") + e.what());
    }
  } else {
    throw ConfigError("domain.shape must be disk, square or polygon, got '" + shape + "'");
  }

  const std::string kind = has("grid.kind") ? kv["grid.kind"] : (shape == "disk" ? "polar" : "cartesian");
  if (kind == "polar") {
    c.grid_kind = GridKind::polar;
  } else if (kind == "cartesian") {
    c.grid_kind = GridKind::cartesian;
  } else {
    throw ConfigError("grid.kind must be polar or cartesian, got '" + kind + "'");
  }
  if (has("grid.n_r")) c.polar.n_r = static_cast<int>(integer("grid.n_r"));
  if (has("grid.n_theta")) c.polar.n_theta = static_cast<int>(integer("grid.n_theta"));
  if (has("grid.grading")) c.polar.grading = num("grid.grading");
  if (has("grid.delta_min")) c.delta_min = num("grid.delta_min");
  if (has("grid.h")) c.cartesian.h = num("grid.h");

  if (has("model.rho_over_pi")) c.rho_over_pi = num("model.rho_over_pi");
  if (has("model.epsilon")) c.epsilon = num("model.epsilon");

  if (has("sweep.lambda_max")) c.lambda_max = num("sweep.lambda_max");
  if (has("sweep.lambda_min")) c.lambda_min = num("sweep.lambda_min");
  if (has("sweep.count")) c.lambda_count = static_cast<int>(integer("sweep.count"));
  if (has("sweep.p")) c.p_grid = to_list("sweep.p", kv["sweep.p"]);
  if (has("sweep.radii")) c.radii = to_list("sweep.radii", kv["sweep.radii"]);

  if (has("solve.lambda")) c.solve_lambda = num("solve.lambda");

  if (has("probe.trials")) c.probe_trials = static_cast<int>(integer("probe.trials"));
  if (has("probe.power_steps")) c.probe_power_steps = static_cast<int>(integer("probe.power_steps"));

  if (has("kernel.r_trunc")) c.kernel_r_trunc = num("kernel.r_trunc");
  if (has("kernel.n_r")) c.kernel.n_r = static_cast<int>(integer("kernel.n_r"));
  if (has("kernel.n_theta")) c.kernel.n_theta = static_cast<int>(integer("kernel.n_theta"));
  if (has("kernel.core_spacing")) c.kernel.core_spacing = num("kernel.core_spacing");
  if (has("kernel.threshold")) c.kernel_threshold = num("kernel.threshold");

  if (has("run.seed")) {
    const long long s = integer("run.seed");
    if (s < 0) throw ConfigError("run.seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (has("run.out")) c.out_dir = kv["run.out"];
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, std::filesystem::path(path).parent_path().string());
}

void validate(const RunConfig& c) {
  try {
    toda::validate(c.domain);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const double pi = std::numbers::pi;
  if (!(c.rho() > 4.0 * pi && c.rho() < 8.0 * pi)) {
    throw ConfigError("model.rho_over_pi must lie in (4, 8), got " + fmt(c.rho_over_pi));
  }
  if (!(c.epsilon > 0.0 && c.epsilon < 0.25)) throw ConfigError("model.epsilon must lie in (0, 1/4)");
  if (c.grid_kind == GridKind::polar && !std::holds_alternative<Disk>(c.domain.shape)) {
    throw ConfigError("polar grids require a disk");
  }
  if (c.polar.n_r < 4 || c.polar.n_theta < 3) throw ConfigError("grid.n_r >= 4 and grid.n_theta >= 3 required");
  if (c.polar.n_theta % c.domain.symmetry_order != 0) {
    throw ConfigError("grid.n_theta must be a multiple of domain.symmetry");
  }
  if (c.polar.grading && !(*c.polar.grading >= 0.0)) throw ConfigError("grid.grading must be nonnegative");
  if (!(c.delta_min > 0.0) || !(c.cartesian.h > 0.0)) throw ConfigError("grid.delta_min and grid.h must be positive");
  if (!(c.lambda_max > 0.0 && c.lambda_min > 0.0)) throw ConfigError("lambda values must be positive");
  if (c.lambda_count < 1) throw ConfigError("sweep.count must be positive");
  if (c.lambda_count > 1 && !(c.lambda_min < c.lambda_max)) {
    throw ConfigError("lambda schedule must be strictly decreasing (lambda_min < lambda_max)");
  }
  for (double p : c.p_grid) {
    if (!(p >= 1.0)) throw ConfigError("sweep.p entries must be >= 1");
  }
  for (double r : c.radii) {
    if (!(r > 0.0)) throw ConfigError("sweep.radii entries must be positive");
  }
  if (!(c.solve_lambda > 0.0)) throw ConfigError("solve.lambda must be positive");
  if (c.probe_trials < 1 || c.probe_power_steps < 0) throw ConfigError("invalid probe settings");
  if (!(c.kernel_r_trunc > 1.0) || c.kernel.n_r < 4 || c.kernel.n_theta < 12 ||
      !(c.kernel.core_spacing > 0.0) || !(c.kernel_threshold > 0.0)) {
    throw ConfigError("invalid kernel settings");
  }
  if (c.kernel.n_theta % 12 != 0) throw ConfigError("kernel.n_theta must be a multiple of 12");
}

std::string canonical_form(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["domain.shape"] = shape_name(c.domain);
  kv["domain.symmetry"] = std::to_string(c.domain.symmetry_order);
  if (const auto* d = std::get_if<Disk>(&c.domain.shape)) kv["domain.radius"] = fmt(d->radius);
  if (const auto* s = std::get_if<Square>(&c.domain.shape)) kv["domain.side"] = fmt(s->side);
  if (const auto* p = std::get_if<Polygon>(&c.domain.shape)) {
    std::string v;
    for (const Point& q : p->vertices) v += (v.empty() ? "" : ";") + fmt(q.x) + " " + fmt(q.y);
    kv["domain.vertices"] = v;
  }
  kv["grid.kind"] = c.grid_kind == GridKind::polar ? "polar" : "cartesian";
  kv["grid.n_r"] = std::to_string(c.polar.n_r);
  kv["grid.n_theta"] = std::to_string(c.polar.n_theta);
  kv["grid.grading"] = c.polar.grading ? fmt(*c.polar.grading) : "auto";
  kv["grid.delta_min"] = fmt(c.delta_min);
  kv["grid.h"] = fmt(c.cartesian.h);
  kv["model.rho_over_pi"] = fmt(c.rho_over_pi);
  kv["model.epsilon"] = fmt(c.epsilon);
  kv["sweep.lambda_max"] = fmt(c.lambda_max);
  kv["sweep.lambda_min"] = fmt(c.lambda_min);
  kv["sweep.count"] = std::to_string(c.lambda_count);
  kv["sweep.p"] = fmt(c.p_grid);
  kv["sweep.radii"] = fmt(c.radii);
  kv["solve.lambda"] = fmt(c.solve_lambda);
  kv["probe.trials"] = std::to_string(c.probe_trials);
  kv["probe.power_steps"] = std::to_string(c.probe_power_steps);
  kv["kernel.r_trunc"] = fmt(c.kernel_r_trunc);
  kv["kernel.n_r"] = std::to_string(c.kernel.n_r);
  kv["kernel.n_theta"] = std::to_string(c.kernel.n_theta);
  kv["kernel.core_spacing"] = fmt(c.kernel.core_spacing);
  kv["kernel.threshold"] = fmt(c.kernel_threshold);
  kv["run.seed"] = std::to_string(c.seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_form(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace toda
