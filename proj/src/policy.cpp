#include "rngccs/policy.hpp"

#include <algorithm>

#include "rngccs/util.hpp"

namespace rngccs {

std::map<std::string, double> PolicyScenario::default_pathway_ci() {
  // gCO2e per MJ of fuel, lifecycle. Illustrative stand-ins for the
  // regulator's certified pathway table.
  return {
      {"food_waste", 32.0}, {"green_waste", 38.0}, {"grease", 28.0},
      {"crop_residue", 44.0}, {"manure", 25.0},
      {"landfill_gas", 46.0}, {"wastewater", 36.0},
  };
}

std::vector<PolicyScenario> builtin_scenarios() {
  PolicyScenario baseline;
  baseline.name = "baseline";

  PolicyScenario no_rfs = baseline;
  no_rfs.name = "no_rfs";
  no_rfs.rin_price = 0.0;

  PolicyScenario no_threshold = baseline;
  no_threshold.name = "no_45q_threshold";
  no_threshold.q45_threshold = 0.0;

  PolicyScenario high = baseline;
  high.name = "high_policy";
  high.lcfs_price = 200.0;
  high.rin_price = 1.50;

  PolicyScenario low = baseline;
  low.name = "low_policy";
  low.lcfs_price = 20.0;
  low.rin_price = 0.0;

  return {baseline, no_rfs, no_threshold, high, low};
}

PolicyScenario builtin_scenario(const std::string& name) {
  std::string key = lower(name);
  std::replace(key.begin(), key.end(), '-', '_');
  auto all = builtin_scenarios();
  for (const auto& s : all)
    if (s.name == key) return s;
  std::string names;
  for (const auto& s : all) names += (names.empty() ? "" : ", ") + s.name;
  throw InputError("unknown scenario '" + name + "'; valid scenarios: " + names);
}

std::vector<std::string> validate_policy(const PolicyScenario& s) {
  std::vector<std::string> out;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0)) out.push_back(std::string(name) + " must be >= 0");
  };
  nonneg(s.lcfs_price, "lcfs_price");
  nonneg(s.rin_price, "rin_price");
  nonneg(s.q45_price, "q45_price");
  nonneg(s.q45_threshold, "q45_threshold");
  nonneg(s.rng_price, "rng_price");
  nonneg(s.grid_ci, "grid_ci");
  nonneg(s.capture_electricity, "capture_electricity");
  nonneg(s.truck_ef, "truck_ef");
  if (!(s.gge_energy_gj > 0)) out.push_back("gge_energy_gj must be > 0");
  return out;
}

std::vector<std::string> policy_warnings(const PolicyScenario& s) {
  std::vector<std::string> out;
  for (const auto& [key, ci] : s.pathway_ci) {
    if (ci >= s.benchmark_ci) {
      out.push_back("pathway '" + key + "' CI " + format_number(ci) +
                    " is not below benchmark " + format_number(s.benchmark_ci) +
                    "; that pathway earns no positive fuel credit");
    }
  }
  return out;
}

double lcfs_credit_tonnes(double ch4_energy_gj, const std::string& pathway_key,
                          double co2_sequestered_t, double co2_truck_ton_miles,
                          double co2_captured_t, const PolicyScenario& scenario) {
  auto it = scenario.pathway_ci.find(pathway_key);
  if (it == scenario.pathway_ci.end())
    throw InputError("no carbon-intensity pathway for '" + pathway_key + "'");
  // g/MJ difference x MJ, then grams -> tonnes.
  double fuel_credit = (scenario.benchmark_ci - it->second) *
                       (ch4_energy_gj * 1000.0) * 1e-6;
  double penalty = (scenario.grid_ci * scenario.capture_electricity * co2_captured_t +
                    scenario.truck_ef * co2_truck_ton_miles) *
                   1e-6;
  return fuel_credit + co2_sequestered_t - penalty;
}

double rin_revenue(double ch4_energy_gj, const PolicyScenario& scenario) {
  return scenario.rin_price * (ch4_energy_gj / scenario.gge_energy_gj);
}

Q45Terms q45_terms(const PolicyScenario& scenario) {
  return {scenario.q45_price, scenario.q45_threshold};
}

}  // namespace rngccs
