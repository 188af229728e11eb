#include "rngccs/technoeconomics.hpp"

#include <cmath>

#include "rngccs/domain.hpp"
#include "rngccs/util.hpp"

namespace rngccs {

std::vector<std::string> validate_params(const TechnoEconomicParams& p) {
  std::vector<std::string> out;
  if (!(p.discount_rate > 0 && p.discount_rate < 1))
    out.push_back("discount_rate must be in (0, 1)");
  if (p.project_years < 1) out.push_back("project_years must be >= 1");
  if (!(p.capture_efficiency > 0 && p.capture_efficiency <= 1))
    out.push_back("capture_efficiency must be in (0, 1]");
  if (!(p.ch4_lhv > 0)) out.push_back("ch4_lhv must be > 0");
  if (!(p.co2_density > 0)) out.push_back("co2_density must be > 0");
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0)) out.push_back(std::string(name) + " must be >= 0");
  };
  nonneg(p.digester_capex_per_capacity, "digester_capex_per_capacity");
  nonneg(p.upgrading_cost, "upgrading_cost");
  nonneg(p.capture_compression_cost, "capture_compression_cost");
  nonneg(p.feedstock_transport_fixed, "feedstock_transport_fixed");
  nonneg(p.feedstock_transport_per_mile, "feedstock_transport_per_mile");
  nonneg(p.co2_truck_fixed, "co2_truck_fixed");
  nonneg(p.co2_truck_per_mile, "co2_truck_per_mile");
  nonneg(p.rng_injection_cost, "rng_injection_cost");
  return out;
}

double capital_recovery_factor(double rate, int years) {
  double g = std::pow(1.0 + rate, years);
  return rate * g / (g - 1.0);
}

double biogas_from_feedstock(const std::map<std::string, double>& mix,
                             const NetworkInstance& instance) {
  double total = 0.0;
  for (const auto& [type_id, wet_tons] : mix) {
    int fi = instance.feedstock_index(type_id);
    if (fi < 0) throw InputError("unknown feedstock type '" + type_id + "'");
    total += wet_tons * instance.feedstock_types[fi].biogas_yield;
  }
  return total;
}

UpgradeSplit upgrade_split(double biogas_m3, double methane_fraction,
                           const TechnoEconomicParams& params) {
  UpgradeSplit s;
  s.ch4_energy_gj = biogas_m3 * methane_fraction * params.ch4_lhv;
  s.co2_captured_t = biogas_m3 * (1.0 - methane_fraction) * params.co2_density *
                     params.capture_efficiency;
  return s;
}

CostModel cost_coefficients(const NetworkInstance& inst) {
  const auto& p = inst.params;
  CostModel cm;

  cm.facility_fixed.reserve(inst.facilities.size());
  cm.facility_processing.reserve(inst.facilities.size());
  for (const auto& f : inst.facilities) {
    cm.facility_fixed.push_back(f.fixed_cost);
    cm.facility_processing.push_back(f.variable_processing_cost);
  }

  cm.feedstock_arc_cost.reserve(inst.dist_source_facility.size());
  for (const auto& a : inst.dist_source_facility) {
    cm.feedstock_arc_cost.push_back(p.feedstock_transport_fixed +
                                    p.feedstock_transport_per_mile * a.miles);
  }

  cm.upgrading_per_gj = p.upgrading_cost + p.rng_injection_cost;
  cm.capture_per_t = p.capture_compression_cost;

  cm.co2_arc_cost.reserve(inst.dist_facility_sink.size());
  for (const auto& a : inst.dist_facility_sink) {
    cm.co2_arc_cost.push_back(p.co2_truck_fixed + p.co2_truck_per_mile * a.miles);
  }

  cm.sink_fixed.reserve(inst.sinks.size());
  cm.sink_unit.reserve(inst.sinks.size());
  for (const auto& k : inst.sinks) {
    cm.sink_fixed.push_back(k.fixed_cost);
    cm.sink_unit.push_back(k.unit_cost);
  }
  return cm;
}

}  // namespace rngccs
