#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toda/config.hpp"
#include "toda/report.hpp"

namespace toda {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;  ///< one line, printed in the pass/fail table
  Json data;            ///< measured values behind the verdict
  double seconds = 0.0; ///< wall time; not part of the JSON summary
};

inline constexpr int kCriterionCount = 11;

/// The acceptance checks. Problem data that the checks pin down (unit disk,
/// rho = 6 pi for the closed-form oracles) is fixed; resolution, sweep,
/// probe and kernel settings and the seed come from the configuration.
/// Sweep-based checks share one computation per suite.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(RunConfig config);
  ~AcceptanceSuite();

  /// Runs one check (1..11). Check 11 repeats checks 1..10 in a fresh suite
  /// and compares the JSON summaries byte for byte.
  CriterionResult run(int id);
  std::vector<CriterionResult> run_all();

  const RunConfig& config() const { return config_; }

 private:
  struct Cache;
  RunConfig config_;
  std::unique_ptr<Cache> cache_;
  std::vector<CriterionResult> first_pass_;
};

/// {"criteria": [...], "all_pass": bool, "config_hash": ...}; no timings.
Json summary_json(const std::vector<CriterionResult>& results, const RunConfig& config);

/// One line per criterion: "[PASS] 3 mean-field oracle: ...".
std::string format_row(const CriterionResult& r);

}  // namespace toda
