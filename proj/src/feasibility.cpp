#include "rngccs/feasibility.hpp"

#include <cmath>

#include "rngccs/technoeconomics.hpp"
#include "rngccs/util.hpp"

namespace rngccs {

namespace {

double map_get(const std::map<std::string, double>& m, const std::string& k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

bool map_get(const std::map<std::string, bool>& m, const std::string& k) {
  auto it = m.find(k);
  return it != m.end() && it->second;
}

}  // namespace

std::vector<std::string> check_solution(const NetworkInstance& inst,
                                        const NetworkSolution& sol,
                                        bool strict_mass_balance, double tol) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& msg) { out.push_back(msg); };
  auto rel_exceeds = [&](double violation, double scale) {
    return violation > tol * std::max(1.0, scale);
  };

  // Per-source shipped totals and per-facility intake by type.
  std::map<std::string, double> shipped_from_source;
  std::map<std::string, double> intake;                      // facility -> wt
  std::map<std::string, double> biogas_from_feed;            // facility -> m3
  for (const auto& [key, wt] : sol.feedstock_flow) {
    const auto& [src_id, fac_id, type_id] = key;
    if (wt < -tol) fail("negative feedstock flow " + src_id + "->" + fac_id);
    int si = inst.source_index(src_id);
    int fj = inst.facility_index(fac_id);
    int ft = inst.feedstock_index(type_id);
    if (si < 0 || fj < 0 || ft < 0) {
      fail("feedstock flow references unknown entity " + src_id + "/" + fac_id +
           "/" + type_id);
      continue;
    }
    if (inst.sources[si].feedstock != type_id)
      fail("source " + src_id + " shipped type '" + type_id +
           "' but supplies '" + inst.sources[si].feedstock + "'");
    shipped_from_source[src_id] += wt;
    intake[fac_id] += wt;
    biogas_from_feed[fac_id] += wt * inst.feedstock_types[ft].biogas_yield;
    if (!map_get(sol.facility_active, fac_id) && wt > tol)
      fail("flow into inactive facility " + fac_id);
  }

  for (const auto& s : inst.sources) {
    double shipped = map_get(shipped_from_source, s.id);
    if (rel_exceeds(shipped - s.supply, s.supply))
      fail("source " + s.id + " ships " + format_number(shipped) +
           " wt, over its supply " + format_number(s.supply));
  }

  double mf = inst.feedstock_types.empty()
                  ? 0.6
                  : inst.feedstock_types[0].methane_fraction;
  double energy_per_m3 = mf * inst.params.ch4_lhv;
  double capture_per_m3 =
      (1.0 - mf) * inst.params.co2_density * inst.params.capture_efficiency;

  std::map<std::string, double> shipped_out;  // facility -> tCO2
  std::map<std::string, double> sink_inflow;  // sink -> tCO2
  for (const auto& [key, t] : sol.co2_shipped) {
    const auto& [fac_id, sink_id] = key;
    if (t < -tol) fail("negative CO2 shipment " + fac_id + "->" + sink_id);
    shipped_out[fac_id] += t;
    sink_inflow[sink_id] += t;
    if (!map_get(sol.sink_active, sink_id) && t > tol)
      fail("CO2 shipped into inactive sink " + sink_id);
  }

  for (const auto& f : inst.facilities) {
    bool active = map_get(sol.facility_active, f.id);
    double in = map_get(intake, f.id);
    double cap_limit = active ? f.capacity : 0.0;
    if (rel_exceeds(in - cap_limit, f.capacity))
      fail("facility " + f.id + " intake " + format_number(in) +
           " exceeds capacity " + format_number(cap_limit));

    double b_expected = map_get(biogas_from_feed, f.id) +
                        (active ? f.fixed_biogas : 0.0);
    double b = map_get(sol.biogas, f.id);
    if (rel_exceeds(std::abs(b - b_expected), b_expected))
      fail("facility " + f.id + " biogas " + format_number(b) +
           " does not match feedstock yields " + format_number(b_expected));

    double m = map_get(sol.ch4, f.id);
    if (rel_exceeds(std::abs(m - b * energy_per_m3), std::abs(m)))
      fail("facility " + f.id + " CH4 energy breaks the upgrading split");
    double c = map_get(sol.co2_captured, f.id);
    if (rel_exceeds(std::abs(c - b * capture_per_m3), std::abs(c)))
      fail("facility " + f.id + " captured CO2 breaks the upgrading split");

    double shipped = map_get(shipped_out, f.id);
    if (strict_mass_balance) {
      if (rel_exceeds(std::abs(shipped - c), c))
        fail("facility " + f.id + " ships " + format_number(shipped) +
             " of " + format_number(c) + " captured (strict mass balance)");
    } else if (rel_exceeds(shipped - c, c)) {
      fail("facility " + f.id + " ships more CO2 than it captures");
    }

    // 45Q: credited tonnes require eligibility; eligibility requires meeting
    // the capture threshold.
    double r = map_get(sol.q45_credited, f.id);
    bool q = map_get(sol.q45_eligible, f.id);
    if (r < -tol) fail("negative 45Q credited tonnes at " + f.id);
    if (r > tol && !q) fail("facility " + f.id + " earns 45Q while ineligible");
    if (q && inst.policy.q45_threshold > 0 &&
        rel_exceeds(inst.policy.q45_threshold - c, inst.policy.q45_threshold))
      fail("facility " + f.id + " marked 45Q-eligible below the capture threshold");
    if (rel_exceeds(r - shipped, std::max(r, shipped)))
      fail("facility " + f.id + " 45Q tonnes exceed shipped tonnes");
  }

  for (const auto& k : inst.sinks) {
    double inflow = map_get(sink_inflow, k.id);
    double s = map_get(sol.co2_sequestered, k.id);
    if (rel_exceeds(std::abs(s - inflow), std::max(s, inflow)))
      fail("sink " + k.id + " sequestered " + format_number(s) +
           " != inflow " + format_number(inflow));
    bool active = map_get(sol.sink_active, k.id);
    double limit = active ? k.capacity : 0.0;
    if (rel_exceeds(s - limit, k.capacity))
      fail("sink " + k.id + " over capacity");
  }

  return out;
}

RecomputedLedger recompute_ledger(const NetworkInstance& inst,
                                  const NetworkSolution& sol) {
  RecomputedLedger led;
  for (const auto& cat : ledger_categories())
    (cat.is_cost ? led.cost : led.revenue)[cat.name] = 0.0;

  const auto& pol = inst.policy;
  CostModel cm = cost_coefficients(inst);
  double mf = inst.feedstock_types.empty()
                  ? 0.6
                  : inst.feedstock_types[0].methane_fraction;
  double energy_per_m3 = mf * inst.params.ch4_lhv;

  // Facility activation, processing, transport.
  for (size_t j = 0; j < inst.facilities.size(); ++j) {
    const auto& f = inst.facilities[j];
    auto it = sol.facility_active.find(f.id);
    if (it != sol.facility_active.end() && it->second)
      led.cost["digester"] += cm.facility_fixed[j];
  }
  for (const auto& [key, wt] : sol.feedstock_flow) {
    const auto& [src_id, fac_id, type_id] = key;
    (void)type_id;
    int si = inst.source_index(src_id);
    int fj = inst.facility_index(fac_id);
    led.cost["digester"] += cm.facility_processing[fj] * wt;
    bool found = false;
    for (size_t a = 0; a < inst.dist_source_facility.size(); ++a) {
      const auto& arc = inst.dist_source_facility[a];
      if (arc.from == si && arc.to == fj) {
        led.cost["feedstock_transport"] += cm.feedstock_arc_cost[a] * wt;
        found = true;
        break;
      }
    }
    if (!found)
      throw InputError("flow " + src_id + "->" + fac_id + " uses a forbidden arc");
  }

  // Gas-side totals.
  double total_gj = 0.0;
  for (const auto& [id, gj] : sol.ch4) total_gj += gj;
  led.cost["upgrading"] += cm.upgrading_per_gj * total_gj;
  led.revenue["rng_sales"] += pol.rng_price * total_gj;
  led.revenue["rin"] += rin_revenue(total_gj, pol);

  double total_captured = 0.0;
  for (const auto& [id, t] : sol.co2_captured) total_captured += t;
  led.cost["capture_compression"] += cm.capture_per_t * total_captured;

  // Trucking and ton-miles.
  double total_ton_miles = 0.0;
  double total_shipped = 0.0;
  for (const auto& [key, t] : sol.co2_shipped) {
    const auto& [fac_id, sink_id] = key;
    int fj = inst.facility_index(fac_id);
    int sk = inst.sink_index(sink_id);
    bool found = false;
    for (size_t a = 0; a < inst.dist_facility_sink.size(); ++a) {
      const auto& arc = inst.dist_facility_sink[a];
      if (arc.from == fj && arc.to == sk) {
        led.cost["co2_trucking"] += cm.co2_arc_cost[a] * t;
        total_ton_miles += arc.miles * t;
        found = true;
        break;
      }
    }
    if (!found)
      throw InputError("shipment " + fac_id + "->" + sink_id +
                       " uses a forbidden arc");
    total_shipped += t;
  }

  // Sequestration.
  for (size_t k = 0; k < inst.sinks.size(); ++k) {
    const auto& sink = inst.sinks[k];
    auto it = sol.sink_active.find(sink.id);
    if (it != sol.sink_active.end() && it->second)
      led.cost["sequestration"] += cm.sink_fixed[k];
    auto sq = sol.co2_sequestered.find(sink.id);
    if (sq != sol.co2_sequestered.end())
      led.cost["sequestration"] += cm.sink_unit[k] * sq->second;
  }

  // LCFS: per-pathway fuel credits from the flows, sequestration credited on
  // delivered tonnes, minus capture electricity and trucking emissions.
  double credits = 0.0;
  for (const auto& [key, wt] : sol.feedstock_flow) {
    const auto& [src_id, fac_id, type_id] = key;
    (void)src_id;
    (void)fac_id;
    int ft = inst.feedstock_index(type_id);
    double gj = wt * inst.feedstock_types[ft].biogas_yield * energy_per_m3;
    credits += lcfs_credit_tonnes(gj, type_id, 0.0, 0.0, 0.0, pol);
  }
  for (const auto& f : inst.facilities) {
    if (f.fixed_biogas <= 0) continue;
    auto it = sol.facility_active.find(f.id);
    if (it == sol.facility_active.end() || !it->second) continue;
    std::string key =
        f.kind == FacilityKind::LandfillGas ? "landfill_gas" : "wastewater";
    credits += lcfs_credit_tonnes(f.fixed_biogas * energy_per_m3, key, 0.0, 0.0,
                                  0.0, pol);
  }
  credits += total_shipped -
             (pol.grid_ci * pol.capture_electricity * total_captured +
              pol.truck_ef * total_ton_miles) *
                 1e-6;
  led.revenue["lcfs"] += pol.lcfs_price * credits;

  // 45Q on credited tonnes.
  double total_r = 0.0;
  for (const auto& [id, r] : sol.q45_credited) total_r += r;
  led.revenue["q45"] += q45_terms(pol).price * total_r;

  return led;
}

double RecomputedLedger::total() const {
  double t = 0.0;
  for (const auto& [k, v] : revenue) t += v;
  for (const auto& [k, v] : cost) t -= v;
  return t;
}

}  // namespace rngccs
