#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "toda/bubbles.hpp"
#include "toda/domain.hpp"

namespace toda {

/// Everything a run needs. Loaded from an INI file with the sections
/// [domain] [grid] [model] [sweep] [solve] [probe] [kernel] [run].
struct RunConfig {
  DomainSpec domain{Disk{1.0}, 4};
  std::string polygon_file;  ///< set when the shape was read from a file

  GridKind grid_kind = GridKind::polar;
  PolarResolution polar{384, 16, std::nullopt};
  CartesianResolution cartesian{};
  double delta_min = 3.5e-4;

  double rho_over_pi = 6.0;
  double epsilon = 0.05;

  double lambda_max = 1e-1;
  double lambda_min = 1e-3;
  int lambda_count = 8;
  std::vector<double> p_grid{1.0, 1.5, 2.0};
  std::vector<double> radii{0.1, 0.3, 0.5};

  double solve_lambda = 1e-2;

  int probe_trials = 10;
  int probe_power_steps = 12;

  double kernel_r_trunc = 40.0;
  KernelResolution kernel{};
  double kernel_threshold = 0.1;

  std::uint64_t seed = 1;
  std::string out_dir = "out";

  double rho() const;
  Resolution resolution() const;
  /// Geometric schedule from lambda_max down to lambda_min.
  std::vector<double> lambdas() const;
};

/// Throws ConfigError on unknown keys, malformed values or out-of-range
/// parameters. Relative polygon paths are resolved against `base_dir`.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Throws ConfigError when the configuration is inconsistent.
void validate(const RunConfig& config);

/// Sorted key=value listing of every setting (run.out excluded), numbers in
/// round-trip precision. Two configs with equal canonical forms run identically.
std::string canonical_form(const RunConfig& config);
/// FNV-1a 64 of the canonical form, 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace toda
