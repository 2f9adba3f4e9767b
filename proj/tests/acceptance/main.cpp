// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "toda/acceptance.hpp"
#include "toda/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"toda acceptance checks"};
  int criterion = 0;
  std::string config_path;
  app.add_option("--criterion", criterion, "criterion to run (1-11); all when omitted")
      ->check(CLI::Range(1, toda::kCriterionCount));
  app.add_option("--config", config_path, "INI configuration")->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    toda::RunConfig cfg = config_path.empty() ? toda::RunConfig{} : toda::load_config(config_path);
    toda::AcceptanceSuite suite(cfg);
    std::vector<toda::CriterionResult> results;
    if (criterion > 0) {
      results.push_back(suite.run(criterion));
    } else {
      results = suite.run_all();
    }
    bool all = true;
    for (const auto& r : results) {
      std::cout << toda::format_row(r) << "  (" << r.seconds << " s)\n";
      all = all && r.pass;
    }
    return all ? 0 : 1;
  } catch (const toda::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
