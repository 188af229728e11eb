#pragma once

#include <map>
#include <string>
#include <vector>

namespace rngccs {

struct NetworkInstance;

// Conversion and cost parameters. Dollar figures are illustrative defaults;
// every field is overridable from the instance parameter file.
struct TechnoEconomicParams {
  double discount_rate = 0.10;       // fraction per year
  int project_years = 15;
  double ch4_lhv = 0.0378;           // GJ per m3 CH4
  double co2_density = 0.001836;     // tCO2 per m3 CO2
  double capture_efficiency = 0.95;  // fraction of upgrading CO2 stream captured

  double digester_capex_per_capacity = 120.0;   // $ per (wt/yr) intake capacity
  double upgrading_cost = 0.30;                 // $ per GJ biogas processed
  double capture_compression_cost = 25.0;       // $ per tCO2
  double feedstock_transport_fixed = 6.0;       // $ per wt
  double feedstock_transport_per_mile = 0.45;   // $ per wt-mile
  double co2_truck_fixed = 4.0;                 // $ per tCO2
  double co2_truck_per_mile = 0.20;             // $ per tCO2-mile
  double rng_injection_cost = 0.15;             // $ per GJ CH4
};

// Checks invariants (rates, efficiency, nonnegative costs); returns messages.
std::vector<std::string> validate_params(const TechnoEconomicParams& p);

// CRF(r, n) = r(1+r)^n / ((1+r)^n - 1); annualizes capital over n years.
double capital_recovery_factor(double rate, int years);

// Sum of wet tons x per-type biogas yield, m3. Unknown type ids throw.
double biogas_from_feedstock(const std::map<std::string, double>& mix,
                             const NetworkInstance& instance);

struct UpgradeSplit {
  double ch4_energy_gj = 0.0;
  double co2_captured_t = 0.0;
};

UpgradeSplit upgrade_split(double biogas_m3, double methane_fraction,
                           const TechnoEconomicParams& params);

// All linear/fixed objective coefficients keyed to the instance's entities
// and arcs, in the units the optimization consumes.
struct CostModel {
  std::vector<double> facility_fixed;        // $/yr when facility is active
  std::vector<double> facility_processing;   // $ per wt intake
  std::vector<double> feedstock_arc_cost;    // $ per wt, parallel to dist_source_facility
  double upgrading_per_gj = 0.0;             // $ per GJ (upgrading + injection)
  double capture_per_t = 0.0;                // $ per tCO2 captured
  std::vector<double> co2_arc_cost;          // $ per tCO2, parallel to dist_facility_sink
  std::vector<double> sink_fixed;            // $/yr when sink is active
  std::vector<double> sink_unit;             // $ per tCO2 injected
};

CostModel cost_coefficients(const NetworkInstance& instance);

}  // namespace rngccs
