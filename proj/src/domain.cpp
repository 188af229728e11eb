#include "rngccs/domain.hpp"

#include <cmath>

#include "rngccs/util.hpp"

namespace rngccs {

std::string to_string(FacilityKind k) {
  switch (k) {
    case FacilityKind::ExistingDigester: return "existing_digester";
    case FacilityKind::CandidateDigester: return "candidate_digester";
    case FacilityKind::LandfillGas: return "landfill_gas";
    case FacilityKind::Wastewater: return "wastewater";
  }
  return "?";
}

std::optional<FacilityKind> facility_kind_from_string(const std::string& s) {
  if (s == "existing_digester") return FacilityKind::ExistingDigester;
  if (s == "candidate_digester") return FacilityKind::CandidateDigester;
  if (s == "landfill_gas") return FacilityKind::LandfillGas;
  if (s == "wastewater") return FacilityKind::Wastewater;
  return std::nullopt;
}

bool is_digester(FacilityKind k) {
  return k == FacilityKind::ExistingDigester || k == FacilityKind::CandidateDigester;
}

namespace {
template <typename T>
int index_of(const std::vector<T>& v, const std::string& id) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i].id == id) return static_cast<int>(i);
  return -1;
}
}  // namespace

int NetworkInstance::feedstock_index(const std::string& id) const {
  return index_of(feedstock_types, id);
}
int NetworkInstance::source_index(const std::string& id) const {
  return index_of(sources, id);
}
int NetworkInstance::facility_index(const std::string& id) const {
  return index_of(facilities, id);
}
int NetworkInstance::sink_index(const std::string& id) const {
  return index_of(sinks, id);
}

std::vector<Violation> validate(const NetworkInstance& inst) {
  std::vector<Violation> out;
  auto add = [&](const std::string& entity, const std::string& field,
                 const std::string& rule) {
    out.push_back({entity, field, rule});
  };

  for (const auto& ft : inst.feedstock_types) {
    if (!(ft.biogas_yield > 0))
      add(ft.id, "biogas_yield", "must be > 0");
    if (!(ft.methane_fraction > 0 && ft.methane_fraction < 1))
      add(ft.id, "methane_fraction", "must be in (0, 1)");
  }

  for (const auto& s : inst.sources) {
    if (!(s.supply >= 0)) add(s.id, "supply", "must be >= 0");
    if (!inst.bbox.contains(s.location))
      add(s.id, "location", "outside instance bounding box");
    if (inst.feedstock_index(s.feedstock) < 0)
      add(s.id, "feedstock", "unknown feedstock type '" + s.feedstock + "'");
  }

  for (const auto& f : inst.facilities) {
    if (is_digester(f.kind)) {
      if (f.fixed_biogas != 0)
        add(f.id, "fixed_biogas", "digesters must have fixed_biogas = 0");
      if (!(f.capacity > 0))
        add(f.id, "capacity", "digesters must have capacity > 0");
    } else {
      if (f.capacity != 0)
        add(f.id, "capacity",
            to_string(f.kind) + " sites must have capacity = 0");
      if (!(f.fixed_biogas >= 0))
        add(f.id, "fixed_biogas", "must be >= 0");
    }
    if (!(f.fixed_cost >= 0)) add(f.id, "fixed_cost", "must be >= 0");
    if (!(f.variable_processing_cost >= 0))
      add(f.id, "variable_processing_cost", "must be >= 0");
  }

  for (const auto& k : inst.sinks) {
    if (!(k.capacity > 0)) add(k.id, "capacity", "must be > 0");
    if (!(k.fixed_cost >= 0)) add(k.id, "fixed_cost", "must be >= 0");
    if (!(k.unit_cost >= 0)) add(k.id, "unit_cost", "must be >= 0");
  }

  auto check_arcs = [&](const std::vector<DistArc>& arcs, size_t n_from,
                        size_t n_to, const std::string& which) {
    for (const auto& a : arcs) {
      if (a.from < 0 || a.from >= static_cast<int>(n_from) || a.to < 0 ||
          a.to >= static_cast<int>(n_to)) {
        add(which, "index", "arc endpoint out of range");
        continue;
      }
      if (!(a.miles >= 0)) add(which, "miles", "must be >= 0");
      if (a.miles > inst.transport_radius)
        add(which, "miles",
            "arc of " + format_number(a.miles) + " miles exceeds transport radius " +
                format_number(inst.transport_radius));
    }
  };
  check_arcs(inst.dist_source_facility, inst.sources.size(),
             inst.facilities.size(), "dist_source_facility");
  check_arcs(inst.dist_facility_sink, inst.facilities.size(),
             inst.sinks.size(), "dist_facility_sink");

  for (const auto& msg : validate_params(inst.params))
    add("params", "technoeconomics", msg);
  for (const auto& msg : validate_policy(inst.policy))
    add("policy", inst.policy.name, msg);

  return out;
}

}  // namespace rngccs
