#pragma once

#include <filesystem>

#include "rngccs/domain.hpp"

namespace rngccs {

// An instance bundle is a directory of CSV files plus params.txt:
//   sources.csv, facilities.csv, sinks.csv, feedstock_types.csv,
//   dist_sf.csv, dist_fk.csv, params.txt
// Loading validates every domain invariant and throws InputError on the
// first schema violation, dangling id, or over-radius distance entry.
NetworkInstance load_instance(const std::filesystem::path& dir);

// Writes the bundle with deterministic formatting: identical instances
// produce byte-identical files.
void write_instance(const NetworkInstance& instance,
                    const std::filesystem::path& dir);

// Applies keys from a parsed params map onto params/policy structs.
// Exposed for the CLI's --scenario handling. Unknown keys throw.
void apply_technoeconomic_key(TechnoEconomicParams& p, const std::string& key,
                              const std::string& value);
void apply_policy_key(PolicyScenario& s, const std::string& key,
                      const std::string& value);

// Resolved-parameter echo for provenance blocks: every key with its
// effective value, defaults included.
std::vector<std::pair<std::string, std::string>> params_echo(
    const TechnoEconomicParams& p);
std::vector<std::pair<std::string, std::string>> policy_echo(
    const PolicyScenario& s);

}  // namespace rngccs
