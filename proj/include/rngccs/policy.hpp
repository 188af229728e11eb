#pragma once

#include <map>
#include <string>
#include <vector>

namespace rngccs {

// One policy environment: credit prices, the 45Q eligibility threshold, and
// the lifecycle carbon-intensity bookkeeping behind LCFS credits.
//
// Carbon-intensity values (benchmark, pathways, grid) are illustrative
// placeholders for the regulator's pathway tables; all are plain config.
struct PolicyScenario {
  std::string name = "baseline";
  double lcfs_price = 100.0;      // $ per tCO2 abated
  double rin_price = 0.25;        // $ per GGE
  double q45_price = 50.0;        // $ per tCO2 sequestered
  double q45_threshold = 100000.0;  // tCO2 captured per facility-year
  double rng_price = 6.0;         // $ per GJ

  double benchmark_ci = 93.0;     // gCO2e per MJ, benchmark fuel
  // Keyed by feedstock type id, plus "landfill_gas" / "wastewater" for
  // facilities with a fixed on-site gas endowment.
  std::map<std::string, double> pathway_ci = default_pathway_ci();
  double grid_ci = 226.0;               // gCO2e per kWh
  double capture_electricity = 120.0;   // kWh per tCO2 captured+compressed
  double truck_ef = 161.8;              // gCO2 per ton-mile
  double gge_energy_gj = 0.08124;       // GJ per gallon gasoline equivalent

  static std::map<std::string, double> default_pathway_ci();
};

// The five built-in scenarios, in presentation order:
// baseline, no_rfs, no_45q_threshold, high_policy, low_policy.
std::vector<PolicyScenario> builtin_scenarios();

// Lookup by name (case-insensitive, '-'/'_' interchangeable). Throws
// InputError listing valid names.
PolicyScenario builtin_scenario(const std::string& name);

// Hard invariant violations (negative prices and the like).
std::vector<std::string> validate_policy(const PolicyScenario& s);
// Soft warnings, e.g. a pathway CI at or above the benchmark.
std::vector<std::string> policy_warnings(const PolicyScenario& s);

// LCFS abatement credits in tCO2e:
//   (benchmark - pathway) x energy + sequestered - capture-electricity and
//   trucking emissions. Linear in every physical argument.
double lcfs_credit_tonnes(double ch4_energy_gj, const std::string& pathway_key,
                          double co2_sequestered_t, double co2_truck_ton_miles,
                          double co2_captured_t, const PolicyScenario& scenario);

// RIN revenue, $: rin_price x (GJ / GJ-per-GGE).
double rin_revenue(double ch4_energy_gj, const PolicyScenario& scenario);

struct Q45Terms {
  double price = 0.0;      // $ per tCO2 sequestered
  double threshold = 0.0;  // tCO2 captured per facility-year for eligibility
};

Q45Terms q45_terms(const PolicyScenario& scenario);

}  // namespace rngccs
