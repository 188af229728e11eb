#include "rngccs/generator.hpp"

#include <cmath>

#include "rngccs/routing.hpp"
#include "rngccs/technoeconomics.hpp"
#include "rngccs/util.hpp"

namespace rngccs {

namespace {

constexpr double kMilesPerDegLat = 69.093;

// Urban waste streams cluster near cities; crop residues and manure do not.
bool is_urban_type(const std::string& id) {
  return id == "food_waste" || id == "green_waste" || id == "grease";
}

std::vector<FeedstockType> default_feedstock_types() {
  // Yields in m3 biogas per wet ton, mid-range literature figures.
  return {
      {"food_waste", 120.0, 0.60}, {"green_waste", 90.0, 0.60},
      {"grease", 400.0, 0.60},     {"crop_residue", 180.0, 0.60},
      {"manure", 35.0, 0.60},
  };
}

LatLon offset_miles(const LatLon& base, double east_miles, double north_miles) {
  LatLon p;
  p.lat = base.lat + north_miles / kMilesPerDegLat;
  double scale = kMilesPerDegLat * std::cos(base.lat * M_PI / 180.0);
  p.lon = base.lon + east_miles / scale;
  return p;
}

LatLon clamp_to(const BoundingBox& box, LatLon p) {
  double lat_inset = 0.02 * (box.max_lat - box.min_lat);
  double lon_inset = 0.02 * (box.max_lon - box.min_lon);
  p.lat = std::clamp(p.lat, box.min_lat + lat_inset, box.max_lat - lat_inset);
  p.lon = std::clamp(p.lon, box.min_lon + lon_inset, box.max_lon - lon_inset);
  return p;
}

LatLon ring_point(Rng& rng, const LatLon& center, double r_min, double r_max) {
  double angle = rng.uniform(0.0, 2.0 * M_PI);
  double r = rng.uniform(r_min, r_max);
  return offset_miles(center, r * std::cos(angle), r * std::sin(angle));
}

}  // namespace

GeneratorSpec demo_spec() { return GeneratorSpec{}; }

NetworkInstance demo_instance() { return generate_synthetic(kDemoSeed, demo_spec()); }

NetworkInstance generate_synthetic(uint64_t seed, const GeneratorSpec& spec) {
  if (spec.n_sources < 0 || spec.n_facilities < 0 || spec.n_sinks < 0)
    throw InputError("generator spec: entity counts must be >= 0");
  if (spec.n_facilities > 0 && spec.n_sinks == 0)
    throw InputError(
        "generator spec: facilities capture CO2 but zero sequestration sinks "
        "were requested; the network cannot sequester anything");
  if (spec.urban_cluster_count < 1)
    throw InputError("generator spec: urban_cluster_count must be >= 1");
  if (!(spec.bbox.max_lat > spec.bbox.min_lat && spec.bbox.max_lon > spec.bbox.min_lon))
    throw InputError("generator spec: degenerate bounding box");

  Rng root(seed ^ 0x52de9cbbULL);
  NetworkInstance inst;
  inst.bbox = spec.bbox;
  inst.transport_radius = spec.transport_radius_miles;
  inst.feedstock_types = default_feedstock_types();
  inst.params = TechnoEconomicParams{};
  inst.policy = PolicyScenario{};  // baseline

  // Urban centroids: one per latitude band, longitude jittered.
  std::vector<LatLon> centroids;
  {
    Rng rng = root.fork(1);
    double lat_lo = spec.bbox.min_lat + 0.15 * (spec.bbox.max_lat - spec.bbox.min_lat);
    double lat_hi = spec.bbox.max_lat - 0.15 * (spec.bbox.max_lat - spec.bbox.min_lat);
    double lon_lo = spec.bbox.min_lon + 0.20 * (spec.bbox.max_lon - spec.bbox.min_lon);
    double lon_hi = spec.bbox.max_lon - 0.20 * (spec.bbox.max_lon - spec.bbox.min_lon);
    for (int c = 0; c < spec.urban_cluster_count; ++c) {
      double band = (c + 0.5) / spec.urban_cluster_count;
      LatLon p;
      p.lat = lat_lo + band * (lat_hi - lat_lo) +
              rng.uniform(-0.03, 0.03) * (lat_hi - lat_lo);
      p.lon = rng.uniform(lon_lo, lon_hi);
      centroids.push_back(p);
    }
  }
  auto centroid_for = [&](int idx) { return centroids[idx % centroids.size()]; };

  // Sources. Type pattern keeps roughly 60% urban waste streams.
  {
    Rng rng = root.fork(2);
    const std::vector<std::string> pattern = {
        "food_waste", "green_waste", "manure", "crop_residue", "food_waste",
        "green_waste", "grease",     "crop_residue", "manure", "food_waste"};
    int urban_seen = 0;
    for (int i = 0; i < spec.n_sources; ++i) {
      FeedstockSource s;
      s.id = "S" + std::to_string(i + 1);
      s.feedstock = pattern[i % pattern.size()];
      LatLon center = centroid_for(i);
      if (is_urban_type(s.feedstock)) {
        // Every tenth urban source scatters outside its cluster, so at
        // least 90% sit within the cluster radius.
        bool scatter = (urban_seen % 10) == 9;
        ++urban_seen;
        if (scatter) {
          s.location.lat = rng.uniform(spec.bbox.min_lat, spec.bbox.max_lat);
          s.location.lon = rng.uniform(spec.bbox.min_lon, spec.bbox.max_lon);
        } else {
          s.location = ring_point(rng, center, 0.0, 0.92 * spec.cluster_radius_miles);
        }
      } else {
        s.location = ring_point(rng, center, 8.0, 26.0);
      }
      s.location = clamp_to(spec.bbox, s.location);

      double lo = 0, hi = 0;
      if (s.feedstock == "food_waste") { lo = 150e3; hi = 600e3; }
      else if (s.feedstock == "green_waste") { lo = 200e3; hi = 700e3; }
      else if (s.feedstock == "grease") { lo = 30e3; hi = 120e3; }
      else if (s.feedstock == "crop_residue") { lo = 250e3; hi = 900e3; }
      else { lo = 300e3; hi = 1100e3; }
      s.supply = std::round(spec.supply_scale * rng.uniform(lo, hi));
      inst.sources.push_back(std::move(s));
    }
  }

  // Facilities near centroids. Kind pattern mixes digesters with fixed-gas
  // collection sites.
  {
    Rng rng = root.fork(3);
    const std::vector<FacilityKind> pattern = {
        FacilityKind::CandidateDigester, FacilityKind::ExistingDigester,
        FacilityKind::LandfillGas,       FacilityKind::CandidateDigester,
        FacilityKind::Wastewater,        FacilityKind::CandidateDigester,
        FacilityKind::LandfillGas,       FacilityKind::ExistingDigester};
    double crf = capital_recovery_factor(inst.params.discount_rate,
                                         inst.params.project_years);
    for (int j = 0; j < spec.n_facilities; ++j) {
      FacilitySite fac;
      fac.id = "F" + std::to_string(j + 1);
      fac.kind = pattern[j % pattern.size()];
      fac.location = clamp_to(spec.bbox, ring_point(rng, centroid_for(j), 0.0, 8.0));
      if (is_digester(fac.kind)) {
        fac.capacity = std::round(rng.uniform(0.8e6, 2.6e6));
        fac.fixed_biogas = 0.0;
        double om = 120e3 + 1.2 * fac.capacity;
        fac.fixed_cost = std::round(
            fac.kind == FacilityKind::CandidateDigester
                ? om + crf * inst.params.digester_capex_per_capacity * fac.capacity
                : om);
        fac.variable_processing_cost = std::round(100 * rng.uniform(1.5, 3.0)) / 100;
      } else {
        fac.capacity = 0.0;
        fac.fixed_biogas = std::round(fac.kind == FacilityKind::LandfillGas
                                          ? rng.uniform(25e6, 90e6)
                                          : rng.uniform(8e6, 30e6));
        // Upgrading-train activation only; collection is sunk.
        fac.fixed_cost = std::round(75e3 + 0.004 * fac.fixed_biogas);
        fac.variable_processing_cost = 0.0;
      }
      inst.facilities.push_back(std::move(fac));
    }
  }

  // Sequestration sites sit in non-urban cells: a ring outside the cluster
  // radius but within trucking reach of the cluster's facilities.
  {
    Rng rng = root.fork(4);
    for (int k = 0; k < spec.n_sinks; ++k) {
      SequestrationSite sink;
      sink.id = "K" + std::to_string(k + 1);
      LatLon center = centroid_for(k);
      LatLon p{};
      for (int tries = 0; tries < 100; ++tries) {
        p = ring_point(rng, center, std::max(20.0, 1.1 * spec.cluster_radius_miles),
                       28.0);
        bool non_urban = true;
        for (const auto& c : centroids)
          non_urban = non_urban &&
                      haversine_miles(p, c) >= spec.cluster_radius_miles;
        if (non_urban) break;
      }
      sink.location = clamp_to(spec.bbox, p);
      sink.capacity = std::round(rng.uniform(250e3, 900e3));
      sink.fixed_cost = std::round(rng.uniform(150e3, 400e3));
      sink.unit_cost = 1.35;
      inst.sinks.push_back(std::move(sink));
    }
  }

  // Distance matrices: road distance approximated by great-circle x circuity.
  // Fixed-gas sites take no feedstock, so they get no inbound arcs.
  DistanceProvider provider;
  provider.mode = DistanceMode::GreatCircleCircuity;
  provider.circuity_factor = 1.3;
  auto matrices = build_matrices(inst.sources, inst.facilities, inst.sinks,
                                 provider, inst.transport_radius);
  for (const auto& a : matrices.source_facility)
    if (is_digester(inst.facilities[a.to].kind))
      inst.dist_source_facility.push_back(a);
  inst.dist_facility_sink = std::move(matrices.facility_sink);

  return inst;
}

}  // namespace rngccs
