#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toda/ansatz.hpp"
#include "toda/config.hpp"
#include "toda/corrector.hpp"
#include "toda/diagnostics.hpp"
#include "toda/linearized.hpp"
#include "toda/meanfield.hpp"

namespace toda {

using Json = nlohmann::json;

/// Versions of the library modules, recorded in every manifest.
const std::map<std::string, std::string>& module_versions();

/// A number rounded to 15 significant digits; non-finite values become null.
Json round15(double v);
Json round15(const std::vector<double>& v);

/// Deterministic serialization: sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

Json to_json(const LinearFit& fit);
Json to_json(const MeanFieldSolution& sol);
Json to_json(const ResidualReport& rep);
Json to_json(const RateFits& fits);
Json to_json(const NormProbe& probe);
Json to_json(const SolveReport& rep);
Json to_json(const SweepReport& sweep);
Json to_json(const MassReport& rep);
Json to_json(const ProfileReport& rep);
Json to_json(const ScalingFit& fit);
Json to_json(const RunConfig& config);

/// CSV table; numbers are printed with 17 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);

/// manifest.json: subcommand, config hash, canonical config, seed, module
/// versions and the list of files written by the subcommand.
Json make_manifest(const std::string& subcommand, const RunConfig& config,
                   const std::vector<std::string>& files);

}  // namespace toda
