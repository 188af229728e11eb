#include "rngccs/instance_io.hpp"

#include <set>

#include "rngccs/util.hpp"

namespace rngccs {

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("parameter '" + key + "': not a number: '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  double v = to_double(key, value);
  int i = static_cast<int>(v);
  if (i != v) throw InputError("parameter '" + key + "': expected integer");
  return i;
}

template <typename T>
void check_unique_ids(const std::vector<T>& items, const std::string& file) {
  std::set<std::string> seen;
  for (const auto& it : items)
    if (!seen.insert(it.id).second)
      throw InputError(file + ": duplicate id '" + it.id + "'");
}

}  // namespace

void apply_technoeconomic_key(TechnoEconomicParams& p, const std::string& key,
                              const std::string& value) {
  if (key == "discount_rate") p.discount_rate = to_double(key, value);
  else if (key == "project_years") p.project_years = to_int(key, value);
  else if (key == "ch4_lhv_gj_per_m3") p.ch4_lhv = to_double(key, value);
  else if (key == "co2_t_per_m3") p.co2_density = to_double(key, value);
  else if (key == "capture_efficiency") p.capture_efficiency = to_double(key, value);
  else if (key == "digester_capex_per_wt_capacity")
    p.digester_capex_per_capacity = to_double(key, value);
  else if (key == "upgrading_cost_per_gj") p.upgrading_cost = to_double(key, value);
  else if (key == "capture_compression_cost_per_t")
    p.capture_compression_cost = to_double(key, value);
  else if (key == "feedstock_transport_fixed_per_wt")
    p.feedstock_transport_fixed = to_double(key, value);
  else if (key == "feedstock_transport_per_wt_mile")
    p.feedstock_transport_per_mile = to_double(key, value);
  else if (key == "co2_truck_fixed_per_t") p.co2_truck_fixed = to_double(key, value);
  else if (key == "co2_truck_per_t_mile") p.co2_truck_per_mile = to_double(key, value);
  else if (key == "rng_injection_cost_per_gj")
    p.rng_injection_cost = to_double(key, value);
  else throw InputError("unknown technoeconomics parameter '" + key + "'");
}

void apply_policy_key(PolicyScenario& s, const std::string& key,
                      const std::string& value) {
  if (key == "name") s.name = value;
  else if (key == "lcfs_price_per_t") s.lcfs_price = to_double(key, value);
  else if (key == "rin_price_per_gge") s.rin_price = to_double(key, value);
  else if (key == "q45_price_per_t") s.q45_price = to_double(key, value);
  else if (key == "q45_threshold_t") s.q45_threshold = to_double(key, value);
  else if (key == "rng_price_per_gj") s.rng_price = to_double(key, value);
  else if (key == "benchmark_ci_g_per_mj") s.benchmark_ci = to_double(key, value);
  else if (key == "grid_ci_g_per_kwh") s.grid_ci = to_double(key, value);
  else if (key == "capture_electricity_kwh_per_t")
    s.capture_electricity = to_double(key, value);
  else if (key == "truck_ef_g_per_ton_mile") s.truck_ef = to_double(key, value);
  else if (key == "gge_energy_gj") s.gge_energy_gj = to_double(key, value);
  else if (key.rfind("pathway_ci.", 0) == 0)
    s.pathway_ci[key.substr(11)] = to_double(key, value);
  else throw InputError("unknown policy parameter '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> params_echo(
    const TechnoEconomicParams& p) {
  auto f = format_number;
  return {
      {"discount_rate", f(p.discount_rate)},
      {"project_years", std::to_string(p.project_years)},
      {"ch4_lhv_gj_per_m3", f(p.ch4_lhv)},
      {"co2_t_per_m3", f(p.co2_density)},
      {"capture_efficiency", f(p.capture_efficiency)},
      {"digester_capex_per_wt_capacity", f(p.digester_capex_per_capacity)},
      {"upgrading_cost_per_gj", f(p.upgrading_cost)},
      {"capture_compression_cost_per_t", f(p.capture_compression_cost)},
      {"feedstock_transport_fixed_per_wt", f(p.feedstock_transport_fixed)},
      {"feedstock_transport_per_wt_mile", f(p.feedstock_transport_per_mile)},
      {"co2_truck_fixed_per_t", f(p.co2_truck_fixed)},
      {"co2_truck_per_t_mile", f(p.co2_truck_per_mile)},
      {"rng_injection_cost_per_gj", f(p.rng_injection_cost)},
  };
}

std::vector<std::pair<std::string, std::string>> policy_echo(
    const PolicyScenario& s) {
  auto f = format_number;
  std::vector<std::pair<std::string, std::string>> out = {
      {"name", s.name},
      {"lcfs_price_per_t", f(s.lcfs_price)},
      {"rin_price_per_gge", f(s.rin_price)},
      {"q45_price_per_t", f(s.q45_price)},
      {"q45_threshold_t", f(s.q45_threshold)},
      {"rng_price_per_gj", f(s.rng_price)},
      {"benchmark_ci_g_per_mj", f(s.benchmark_ci)},
      {"grid_ci_g_per_kwh", f(s.grid_ci)},
      {"capture_electricity_kwh_per_t", f(s.capture_electricity)},
      {"truck_ef_g_per_ton_mile", f(s.truck_ef)},
      {"gge_energy_gj", f(s.gge_energy_gj)},
  };
  for (const auto& [key, ci] : s.pathway_ci)
    out.push_back({"pathway_ci." + key, f(ci)});
  return out;
}

NetworkInstance load_instance(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw InputError("instance bundle '" + dir.string() + "' is not a directory");
  NetworkInstance inst;

  // params.txt first: the radius governs distance validation below.
  auto kv = read_keyvalue_file(dir / "params.txt");
  PolicyScenario base_policy;
  bool policy_named = false;
  for (const auto& [full_key, value] : kv) {
    auto dot = full_key.find('.');
    std::string section = dot == std::string::npos ? "" : full_key.substr(0, dot);
    std::string key = dot == std::string::npos ? full_key : full_key.substr(dot + 1);
    if (section == "instance") {
      if (key == "transport_radius_miles")
        inst.transport_radius = to_double(key, value);
      else if (key == "bbox_min_lat") inst.bbox.min_lat = to_double(key, value);
      else if (key == "bbox_max_lat") inst.bbox.max_lat = to_double(key, value);
      else if (key == "bbox_min_lon") inst.bbox.min_lon = to_double(key, value);
      else if (key == "bbox_max_lon") inst.bbox.max_lon = to_double(key, value);
      else throw InputError("unknown instance parameter '" + key + "'");
    } else if (section == "technoeconomics") {
      apply_technoeconomic_key(inst.params, key, value);
    } else if (section == "policy") {
      if (key.rfind("overrides.", 0) == 0) continue;  // applied after
      apply_policy_key(base_policy, key, value);
      policy_named = policy_named || key == "name";
    } else {
      throw InputError("unknown parameter section '" + section + "' in " +
                       (dir / "params.txt").string());
    }
  }
  for (const auto& [full_key, value] : kv) {
    if (full_key.rfind("policy.overrides.", 0) == 0)
      apply_policy_key(base_policy, full_key.substr(17), value);
  }
  (void)policy_named;
  inst.policy = base_policy;

  auto types = read_csv(dir / "feedstock_types.csv",
                        {"id", "biogas_yield_m3_per_wt", "methane_fraction"});
  for (size_t r = 0; r < types.rows.size(); ++r) {
    const auto& row = types.rows[r];
    FeedstockType t;
    t.id = row[0];
    t.biogas_yield = parse_double_field(row[1], "feedstock_types.csv",
                                        "biogas_yield_m3_per_wt", r + 1);
    t.methane_fraction =
        parse_double_field(row[2], "feedstock_types.csv", "methane_fraction", r + 1);
    inst.feedstock_types.push_back(std::move(t));
  }
  check_unique_ids(inst.feedstock_types, "feedstock_types.csv");

  auto sources =
      read_csv(dir / "sources.csv", {"id", "lat", "lon", "feedstock", "supply_wt_per_yr"});
  for (size_t r = 0; r < sources.rows.size(); ++r) {
    const auto& row = sources.rows[r];
    FeedstockSource s;
    s.id = row[0];
    s.location.lat = parse_double_field(row[1], "sources.csv", "lat", r + 1);
    s.location.lon = parse_double_field(row[2], "sources.csv", "lon", r + 1);
    s.feedstock = row[3];
    s.supply = parse_double_field(row[4], "sources.csv", "supply_wt_per_yr", r + 1);
    if (inst.feedstock_index(s.feedstock) < 0)
      throw InputError("sources.csv: source '" + s.id +
                       "' references unknown feedstock type '" + s.feedstock + "'");
    inst.sources.push_back(std::move(s));
  }
  check_unique_ids(inst.sources, "sources.csv");

  auto facilities = read_csv(
      dir / "facilities.csv",
      {"id", "lat", "lon", "kind", "capacity_wt_per_yr", "fixed_biogas_m3_per_yr",
       "fixed_cost_per_yr", "variable_processing_cost_per_wt"});
  for (size_t r = 0; r < facilities.rows.size(); ++r) {
    const auto& row = facilities.rows[r];
    FacilitySite fs;
    fs.id = row[0];
    fs.location.lat = parse_double_field(row[1], "facilities.csv", "lat", r + 1);
    fs.location.lon = parse_double_field(row[2], "facilities.csv", "lon", r + 1);
    auto kind = facility_kind_from_string(row[3]);
    if (!kind)
      throw InputError("facilities.csv: facility '" + fs.id +
                       "' has unknown kind '" + row[3] + "'");
    fs.kind = *kind;
    fs.capacity =
        parse_double_field(row[4], "facilities.csv", "capacity_wt_per_yr", r + 1);
    fs.fixed_biogas =
        parse_double_field(row[5], "facilities.csv", "fixed_biogas_m3_per_yr", r + 1);
    fs.fixed_cost =
        parse_double_field(row[6], "facilities.csv", "fixed_cost_per_yr", r + 1);
    fs.variable_processing_cost = parse_double_field(
        row[7], "facilities.csv", "variable_processing_cost_per_wt", r + 1);
    inst.facilities.push_back(std::move(fs));
  }
  check_unique_ids(inst.facilities, "facilities.csv");

  auto sinks = read_csv(dir / "sinks.csv", {"id", "lat", "lon", "capacity_t_per_yr",
                                            "fixed_cost_per_yr", "unit_cost_per_t"});
  for (size_t r = 0; r < sinks.rows.size(); ++r) {
    const auto& row = sinks.rows[r];
    SequestrationSite k;
    k.id = row[0];
    k.location.lat = parse_double_field(row[1], "sinks.csv", "lat", r + 1);
    k.location.lon = parse_double_field(row[2], "sinks.csv", "lon", r + 1);
    k.capacity = parse_double_field(row[3], "sinks.csv", "capacity_t_per_yr", r + 1);
    k.fixed_cost = parse_double_field(row[4], "sinks.csv", "fixed_cost_per_yr", r + 1);
    k.unit_cost = parse_double_field(row[5], "sinks.csv", "unit_cost_per_t", r + 1);
    inst.sinks.push_back(std::move(k));
  }
  check_unique_ids(inst.sinks, "sinks.csv");

  auto load_arcs = [&](const std::string& file, const std::string& from_col,
                       const std::string& to_col, auto&& from_index,
                       auto&& to_index) {
    std::vector<DistArc> arcs;
    auto table = read_csv(dir / file, {from_col, to_col, "miles"});
    for (size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      DistArc a;
      a.from = from_index(row[0]);
      a.to = to_index(row[1]);
      if (a.from < 0)
        throw InputError(file + ": unknown " + from_col + " '" + row[0] + "'");
      if (a.to < 0)
        throw InputError(file + ": unknown " + to_col + " '" + row[1] + "'");
      a.miles = parse_double_field(row[2], file, "miles", r + 1);
      if (a.miles > inst.transport_radius)
        throw InputError(file + ": arc " + row[0] + " -> " + row[1] + " is " +
                         format_number(a.miles) + " miles, beyond the " +
                         format_number(inst.transport_radius) +
                         "-mile transport radius");
      arcs.push_back(a);
    }
    return arcs;
  };
  inst.dist_source_facility = load_arcs(
      "dist_sf.csv", "source_id", "facility_id",
      [&](const std::string& id) { return inst.source_index(id); },
      [&](const std::string& id) { return inst.facility_index(id); });
  inst.dist_facility_sink = load_arcs(
      "dist_fk.csv", "facility_id", "sink_id",
      [&](const std::string& id) { return inst.facility_index(id); },
      [&](const std::string& id) { return inst.sink_index(id); });

  auto violations = validate(inst);
  if (!violations.empty()) {
    std::string msg = "instance bundle '" + dir.string() + "' is invalid:";
    for (const auto& v : violations) msg += "\n  " + v.text();
    throw InputError(msg);
  }
  return inst;
}

void write_instance(const NetworkInstance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto f = format_number;

  std::vector<std::vector<std::string>> rows;
  for (const auto& t : inst.feedstock_types)
    rows.push_back({t.id, f(t.biogas_yield), f(t.methane_fraction)});
  write_csv(dir / "feedstock_types.csv",
            {"id", "biogas_yield_m3_per_wt", "methane_fraction"}, rows);

  rows.clear();
  for (const auto& s : inst.sources)
    rows.push_back({s.id, f(s.location.lat), f(s.location.lon), s.feedstock,
                    f(s.supply)});
  write_csv(dir / "sources.csv", {"id", "lat", "lon", "feedstock", "supply_wt_per_yr"},
            rows);

  rows.clear();
  for (const auto& fac : inst.facilities)
    rows.push_back({fac.id, f(fac.location.lat), f(fac.location.lon),
                    to_string(fac.kind), f(fac.capacity), f(fac.fixed_biogas),
                    f(fac.fixed_cost), f(fac.variable_processing_cost)});
  write_csv(dir / "facilities.csv",
            {"id", "lat", "lon", "kind", "capacity_wt_per_yr",
             "fixed_biogas_m3_per_yr", "fixed_cost_per_yr",
             "variable_processing_cost_per_wt"},
            rows);

  rows.clear();
  for (const auto& k : inst.sinks)
    rows.push_back({k.id, f(k.location.lat), f(k.location.lon), f(k.capacity),
                    f(k.fixed_cost), f(k.unit_cost)});
  write_csv(dir / "sinks.csv",
            {"id", "lat", "lon", "capacity_t_per_yr", "fixed_cost_per_yr",
             "unit_cost_per_t"},
            rows);

  rows.clear();
  for (const auto& a : inst.dist_source_facility)
    rows.push_back({inst.sources[a.from].id, inst.facilities[a.to].id, f(a.miles)});
  write_csv(dir / "dist_sf.csv", {"source_id", "facility_id", "miles"}, rows);

  rows.clear();
  for (const auto& a : inst.dist_facility_sink)
    rows.push_back({inst.facilities[a.from].id, inst.sinks[a.to].id, f(a.miles)});
  write_csv(dir / "dist_fk.csv", {"facility_id", "sink_id", "miles"}, rows);

  std::vector<std::string> lines;
  lines.push_back("# ILLUSTRATIVE defaults: parameter values are calibrated for");
  lines.push_back("# model structure at desk scale, not sourced cost data.");
  lines.push_back("[instance]");
  lines.push_back("transport_radius_miles = " + f(inst.transport_radius));
  lines.push_back("bbox_min_lat = " + f(inst.bbox.min_lat));
  lines.push_back("bbox_max_lat = " + f(inst.bbox.max_lat));
  lines.push_back("bbox_min_lon = " + f(inst.bbox.min_lon));
  lines.push_back("bbox_max_lon = " + f(inst.bbox.max_lon));
  lines.push_back("");
  lines.push_back("[technoeconomics]");
  for (const auto& [k, v] : params_echo(inst.params)) lines.push_back(k + " = " + v);
  lines.push_back("");
  lines.push_back("[policy]");
  for (const auto& [k, v] : policy_echo(inst.policy)) lines.push_back(k + " = " + v);
  write_keyvalue_file(dir / "params.txt", lines);
}

}  // namespace rngccs
