#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rngccs/policy.hpp"
#include "rngccs/technoeconomics.hpp"

namespace rngccs {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct BoundingBox {
  double min_lat = 0.0, max_lat = 0.0;
  double min_lon = 0.0, max_lon = 0.0;
  bool contains(const LatLon& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon &&
           p.lon <= max_lon;
  }
};

struct FeedstockType {
  std::string id;               // food_waste | green_waste | grease | crop_residue | manure
  double biogas_yield = 0.0;    // m3 biogas per wet ton
  double methane_fraction = 0.60;
};

struct FeedstockSource {
  std::string id;
  LatLon location;
  std::string feedstock;        // FeedstockType id
  double supply = 0.0;          // wet tons per year
};

enum class FacilityKind { ExistingDigester, CandidateDigester, LandfillGas, Wastewater };

std::string to_string(FacilityKind k);
std::optional<FacilityKind> facility_kind_from_string(const std::string& s);
bool is_digester(FacilityKind k);

struct FacilitySite {
  std::string id;
  LatLon location;
  FacilityKind kind = FacilityKind::CandidateDigester;
  double capacity = 0.0;      // wet tons intake per year; 0 for landfill/wastewater
  double fixed_biogas = 0.0;  // m3/yr on-site gas; 0 for digesters
  double fixed_cost = 0.0;    // annualized activation cost, $/yr
  double variable_processing_cost = 0.0;  // $ per wet ton intake
};

struct SequestrationSite {
  std::string id;
  LatLon location;
  double capacity = 0.0;    // tCO2 per year
  double fixed_cost = 0.0;  // $/yr, wells + monitoring
  double unit_cost = 0.0;   // $ per tCO2 injected
};

// One sparse distance-matrix entry; absent entries are forbidden arcs.
struct DistArc {
  int from = -1;  // index into sources (sf) or facilities (fk)
  int to = -1;    // index into facilities (sf) or sinks (fk)
  double miles = 0.0;
};

struct NetworkInstance {
  std::vector<FeedstockType> feedstock_types;
  std::vector<FeedstockSource> sources;
  std::vector<FacilitySite> facilities;
  std::vector<SequestrationSite> sinks;
  std::vector<DistArc> dist_source_facility;
  std::vector<DistArc> dist_facility_sink;
  TechnoEconomicParams params;
  PolicyScenario policy;
  BoundingBox bbox;
  double transport_radius = 50.0;  // miles

  int feedstock_index(const std::string& id) const;  // -1 if unknown
  int source_index(const std::string& id) const;
  int facility_index(const std::string& id) const;
  int sink_index(const std::string& id) const;
};

// One invariant violation: which entity, which field, which rule.
struct Violation {
  std::string entity;
  std::string field;
  std::string rule;
  std::string text() const { return entity + "." + field + ": " + rule; }
};

// Checks every domain invariant; empty result means the instance is valid.
// Violations are data, not errors.
std::vector<Violation> validate(const NetworkInstance& instance);

}  // namespace rngccs
