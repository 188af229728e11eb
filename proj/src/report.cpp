#include "rngccs/report.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rngccs/feasibility.hpp"
#include "rngccs/util.hpp"

namespace rngccs {

namespace {

using Json = nlohmann::ordered_json;

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* feedstock_color(const std::string& type) {
  if (type == "food_waste") return "#7a9e43";
  if (type == "green_waste") return "#4e7c32";
  if (type == "grease") return "#b3a23c";
  if (type == "crop_residue") return "#c9b458";
  if (type == "manure") return "#8a6d3b";
  return "#777777";
}

struct Projection {
  double min_lat, max_lat, min_lon, max_lon;
  double width, height, margin;
  double x(double lon) const {
    return margin + (lon - min_lon) / (max_lon - min_lon) * width;
  }
  double y(double lat) const {
    return margin + (max_lat - lat) / (max_lat - min_lat) * height;
  }
};

Projection make_projection(const BoundingBox& box) {
  Projection p;
  p.min_lat = box.min_lat;
  p.max_lat = box.max_lat;
  p.min_lon = box.min_lon;
  p.max_lon = box.max_lon;
  p.margin = 24.0;
  p.width = 720.0;
  // Equirectangular: keep the miles aspect ratio at the mid latitude.
  double midlat = (box.min_lat + box.max_lat) / 2.0 * M_PI / 180.0;
  double lon_miles = (box.max_lon - box.min_lon) * std::cos(midlat);
  double lat_miles = box.max_lat - box.min_lat;
  p.height = p.width * lat_miles / std::max(1e-9, lon_miles);
  return p;
}

void check_solution_matches_instance(const NetworkSolution& sol,
                                     const NetworkInstance& inst) {
  for (const auto& [id, v] : sol.facility_active) {
    (void)v;
    if (inst.facility_index(id) < 0)
      throw InputError("solution references unknown facility '" + id + "'");
  }
  for (const auto& [id, v] : sol.sink_active) {
    (void)v;
    if (inst.sink_index(id) < 0)
      throw InputError("solution references unknown sink '" + id + "'");
  }
  for (const auto& [key, v] : sol.feedstock_flow) {
    (void)v;
    if (inst.source_index(std::get<0>(key)) < 0)
      throw InputError("solution references unknown source '" +
                       std::get<0>(key) + "'");
  }
}

double arc_miles(const std::vector<DistArc>& arcs, int from, int to) {
  for (const auto& a : arcs)
    if (a.from == from && a.to == to) return a.miles;
  return -1.0;
}

}  // namespace

void write_solution_csv(const NetworkSolution& sol,
                        const std::filesystem::path& file) {
  std::vector<std::vector<std::string>> rows;
  auto f = format_exact;  // values feed back into regeneration
  for (const auto& [id, v] : sol.facility_active)
    rows.push_back({"facility_active", id, "", "", v ? "1" : "0"});
  for (const auto& [id, v] : sol.sink_active)
    rows.push_back({"sink_active", id, "", "", v ? "1" : "0"});
  for (const auto& [id, v] : sol.q45_eligible)
    rows.push_back({"q45_eligible", id, "", "", v ? "1" : "0"});
  for (const auto& [id, v] : sol.biogas)
    rows.push_back({"biogas", id, "", "", f(v)});
  for (const auto& [id, v] : sol.ch4) rows.push_back({"ch4", id, "", "", f(v)});
  for (const auto& [id, v] : sol.co2_captured)
    rows.push_back({"co2_captured", id, "", "", f(v)});
  for (const auto& [id, v] : sol.q45_credited)
    rows.push_back({"q45_credited", id, "", "", f(v)});
  for (const auto& [key, v] : sol.feedstock_flow)
    rows.push_back({"feedstock_flow", std::get<0>(key), std::get<1>(key),
                    std::get<2>(key), f(v)});
  for (const auto& [key, v] : sol.co2_shipped)
    rows.push_back({"co2_shipped", key.first, key.second, "", f(v)});
  for (const auto& [id, v] : sol.co2_sequestered)
    rows.push_back({"co2_sequestered", id, "", "", f(v)});
  for (const auto& [cat, v] : sol.revenue_breakdown)
    rows.push_back({"revenue", cat, "", "", f(v)});
  for (const auto& [cat, v] : sol.cost_breakdown)
    rows.push_back({"cost", cat, "", "", f(v)});
  rows.push_back({"objective", "", "", "", f(sol.objective)});
  rows.push_back({"bound", "", "", "", f(sol.bound)});
  rows.push_back({"gap", "", "", "", f(sol.gap)});
  rows.push_back({"nodes", "", "", "", std::to_string(sol.nodes)});
  rows.push_back({"lp_iterations", "", "", "", std::to_string(sol.lp_iterations)});
  rows.push_back({"status", "", "", "", to_string(sol.status)});
  write_csv(file, {"kind", "id1", "id2", "id3", "value"}, rows);
}

NetworkSolution read_solution_csv(const std::filesystem::path& file) {
  NetworkSolution sol;
  auto table = read_csv(file, {"kind", "id1", "id2", "id3", "value"});
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string& kind = row[0];
    auto num = [&] {
      return parse_double_field(row[4], file.string(), "value", r + 1);
    };
    if (kind == "facility_active") sol.facility_active[row[1]] = row[4] == "1";
    else if (kind == "sink_active") sol.sink_active[row[1]] = row[4] == "1";
    else if (kind == "q45_eligible") sol.q45_eligible[row[1]] = row[4] == "1";
    else if (kind == "biogas") sol.biogas[row[1]] = num();
    else if (kind == "ch4") sol.ch4[row[1]] = num();
    else if (kind == "co2_captured") sol.co2_captured[row[1]] = num();
    else if (kind == "q45_credited") sol.q45_credited[row[1]] = num();
    else if (kind == "feedstock_flow")
      sol.feedstock_flow[{row[1], row[2], row[3]}] = num();
    else if (kind == "co2_shipped") sol.co2_shipped[{row[1], row[2]}] = num();
    else if (kind == "co2_sequestered") sol.co2_sequestered[row[1]] = num();
    else if (kind == "revenue") sol.revenue_breakdown[row[1]] = num();
    else if (kind == "cost") sol.cost_breakdown[row[1]] = num();
    else if (kind == "objective") sol.objective = num();
    else if (kind == "bound") sol.bound = num();
    else if (kind == "gap") sol.gap = num();
    else if (kind == "nodes") sol.nodes = static_cast<long>(num());
    else if (kind == "lp_iterations") sol.lp_iterations = static_cast<long>(num());
    else if (kind == "status") {
      for (auto s : {SolveStatus::Optimal, SolveStatus::GapLimit,
                     SolveStatus::NodeLimit, SolveStatus::TimeLimit,
                     SolveStatus::NoIncumbent})
        if (to_string(s) == row[4]) sol.status = s;
    } else {
      throw InputError(file.string() + ": unknown record kind '" + kind + "'");
    }
  }
  return sol;
}

namespace {

void write_ledger_csv(const NetworkSolution& sol,
                      const std::filesystem::path& file) {
  double total_gj = sol.total_ch4_gj();
  double cost_total = 0.0, revenue_total = 0.0;
  for (const auto& [cat, v] : sol.cost_breakdown) cost_total += v;
  for (const auto& [cat, v] : sol.revenue_breakdown) revenue_total += v;

  std::vector<std::vector<std::string>> rows;
  for (const auto& cat : ledger_categories()) {
    const auto& side = cat.is_cost ? sol.cost_breakdown : sol.revenue_breakdown;
    double v = 0.0;
    auto it = side.find(cat.name);
    if (it != side.end()) v = it->second;
    double side_total = cat.is_cost ? cost_total : revenue_total;
    rows.push_back({cat.name, cat.is_cost ? "cost" : "revenue", cat.group,
                    format_number(v),
                    total_gj > 0 ? format_number(v / total_gj) : "NA",
                    side_total > 0 ? format_number(v / side_total) : "NA"});
  }
  write_csv(file,
            {"category", "kind", "group", "dollars_per_year", "dollars_per_gj",
             "share_of_kind"},
            rows);
}

void write_geojson(const NetworkSolution& sol, const NetworkInstance& inst,
                   const std::filesystem::path& file) {
  Json root;
  root["type"] = "FeatureCollection";
  Json features = Json::array();

  auto point = [](const LatLon& p) {
    Json g;
    g["type"] = "Point";
    g["coordinates"] = {p.lon, p.lat};
    return g;
  };
  auto line = [](const LatLon& a, const LatLon& b) {
    Json g;
    g["type"] = "LineString";
    g["coordinates"] = {{a.lon, a.lat}, {b.lon, b.lat}};
    return g;
  };
  auto get = [](const std::map<std::string, double>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };

  for (const auto& s : inst.sources) {
    Json f;
    f["type"] = "Feature";
    f["geometry"] = point(s.location);
    f["properties"] = {{"id", s.id},
                       {"role", "source"},
                       {"feedstock", s.feedstock},
                       {"supply_wt_per_yr", s.supply}};
    features.push_back(std::move(f));
  }
  for (const auto& fac : inst.facilities) {
    auto active = sol.facility_active.find(fac.id);
    Json f;
    f["type"] = "Feature";
    f["geometry"] = point(fac.location);
    f["properties"] = {
        {"id", fac.id},
        {"role", "facility"},
        {"kind", to_string(fac.kind)},
        {"active", active != sol.facility_active.end() && active->second},
        {"biogas_m3_per_yr", get(sol.biogas, fac.id)},
        {"ch4_gj_per_yr", get(sol.ch4, fac.id)},
        {"co2_captured_t_per_yr", get(sol.co2_captured, fac.id)},
        {"q45_eligible",
         sol.q45_eligible.count(fac.id) && sol.q45_eligible.at(fac.id)},
        {"q45_credited_t_per_yr", get(sol.q45_credited, fac.id)}};
    features.push_back(std::move(f));
  }
  for (const auto& k : inst.sinks) {
    auto active = sol.sink_active.find(k.id);
    Json f;
    f["type"] = "Feature";
    f["geometry"] = point(k.location);
    f["properties"] = {
        {"id", k.id},
        {"role", "sink"},
        {"active", active != sol.sink_active.end() && active->second},
        {"capacity_t_per_yr", k.capacity},
        {"sequestered_t_per_yr", get(sol.co2_sequestered, k.id)}};
    features.push_back(std::move(f));
  }

  for (const auto& [key, wt] : sol.feedstock_flow) {
    if (!(wt > 0)) continue;
    const auto& [src_id, fac_id, type_id] = key;
    int si = inst.source_index(src_id);
    int fj = inst.facility_index(fac_id);
    Json f;
    f["type"] = "Feature";
    f["geometry"] = line(inst.sources[si].location, inst.facilities[fj].location);
    f["properties"] = {{"kind", "feedstock_arc"},
                       {"from", src_id},
                       {"to", fac_id},
                       {"feedstock", type_id},
                       {"flow_wt_per_yr", wt},
                       {"miles", arc_miles(inst.dist_source_facility, si, fj)}};
    features.push_back(std::move(f));
  }
  for (const auto& [key, t] : sol.co2_shipped) {
    if (!(t > 0)) continue;
    int fj = inst.facility_index(key.first);
    int sk = inst.sink_index(key.second);
    Json f;
    f["type"] = "Feature";
    f["geometry"] = line(inst.facilities[fj].location, inst.sinks[sk].location);
    f["properties"] = {{"kind", "co2_arc"},
                       {"from", key.first},
                       {"to", key.second},
                       {"flow_t_per_yr", t},
                       {"miles", arc_miles(inst.dist_facility_sink, fj, sk)}};
    features.push_back(std::move(f));
  }

  root["features"] = std::move(features);
  write_file_atomic(file, root.dump(2) + "\n");
}

void write_map_svg(const NetworkSolution& sol, const NetworkInstance& inst,
                   const std::filesystem::path& file) {
  Projection pr = make_projection(inst.bbox);
  double W = pr.width + 2 * pr.margin;
  double H = pr.height + 2 * pr.margin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
      << svg_num(W) << ' ' << svg_num(H) << "\" width=\"" << svg_num(W)
      << "\" height=\"" << svg_num(H) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(W) << "\" height=\""
      << svg_num(H) << "\" fill=\"#fbfaf7\"/>\n";

  double max_feed = 1.0, max_co2 = 1.0;
  for (const auto& [k, v] : sol.feedstock_flow) max_feed = std::max(max_feed, v);
  for (const auto& [k, v] : sol.co2_shipped) max_co2 = std::max(max_co2, v);

  svg << "<g stroke=\"#e8a33d\" stroke-opacity=\"0.75\" fill=\"none\">\n";
  for (const auto& [key, wt] : sol.feedstock_flow) {
    if (!(wt > 0)) continue;
    const auto& a = inst.sources[inst.source_index(std::get<0>(key))].location;
    const auto& b = inst.facilities[inst.facility_index(std::get<1>(key))].location;
    svg << "<line x1=\"" << svg_num(pr.x(a.lon)) << "\" y1=\"" << svg_num(pr.y(a.lat))
        << "\" x2=\"" << svg_num(pr.x(b.lon)) << "\" y2=\"" << svg_num(pr.y(b.lat))
        << "\" stroke-width=\"" << svg_num(0.7 + 2.5 * wt / max_feed) << "\"/>\n";
  }
  svg << "</g>\n<g stroke=\"#c0392b\" stroke-opacity=\"0.8\" fill=\"none\">\n";
  for (const auto& [key, t] : sol.co2_shipped) {
    if (!(t > 0)) continue;
    const auto& a = inst.facilities[inst.facility_index(key.first)].location;
    const auto& b = inst.sinks[inst.sink_index(key.second)].location;
    svg << "<line x1=\"" << svg_num(pr.x(a.lon)) << "\" y1=\"" << svg_num(pr.y(a.lat))
        << "\" x2=\"" << svg_num(pr.x(b.lon)) << "\" y2=\"" << svg_num(pr.y(b.lat))
        << "\" stroke-width=\"" << svg_num(0.7 + 2.5 * t / max_co2) << "\"/>\n";
  }
  svg << "</g>\n";

  for (const auto& s : inst.sources) {
    svg << "<circle cx=\"" << svg_num(pr.x(s.location.lon)) << "\" cy=\""
        << svg_num(pr.y(s.location.lat)) << "\" r=\"3\" fill=\""
        << feedstock_color(s.feedstock) << "\" fill-opacity=\"0.85\"/>\n";
  }
  for (const auto& fac : inst.facilities) {
    auto it = sol.facility_active.find(fac.id);
    bool active = it != sol.facility_active.end() && it->second;
    double x = pr.x(fac.location.lon), y = pr.y(fac.location.lat);
    svg << "<rect x=\"" << svg_num(x - 5) << "\" y=\"" << svg_num(y - 5)
        << "\" width=\"10\" height=\"10\" fill=\""
        << (active ? "#2c5f8a" : "none") << "\" stroke=\"#2c5f8a\"/>\n";
  }
  for (const auto& k : inst.sinks) {
    auto it = sol.sink_active.find(k.id);
    bool active = it != sol.sink_active.end() && it->second;
    double x = pr.x(k.location.lon), y = pr.y(k.location.lat);
    svg << "<path d=\"M " << svg_num(x) << ' ' << svg_num(y - 7) << " L "
        << svg_num(x - 6.5) << ' ' << svg_num(y + 5) << " L " << svg_num(x + 6.5)
        << ' ' << svg_num(y + 5) << " Z\" fill=\""
        << (active ? "#555555" : "none") << "\" stroke=\"#555555\"/>\n";
  }

  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n"
      << "<text x=\"" << svg_num(pr.margin) << "\" y=\"14\">sources (circles), "
      << "facilities (squares), sinks (triangles); orange = feedstock, red = CO2"
      << "</text>\n</g>\n";
  svg << "</svg>\n";
  write_file_atomic(file, svg.str());
}

void write_bars_svg(const NetworkSolution& sol,
                    const std::filesystem::path& file) {
  double total_gj = sol.total_ch4_gj();
  std::ostringstream svg;
  double W = 460, H = 340;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' '
      << H << "\" width=\"" << W << "\" height=\"" << H << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"#ffffff\"/>\n";

  if (total_gj <= 0) {
    svg << "<text x=\"24\" y=\"40\" font-family=\"sans-serif\" font-size=\"14\""
        << " fill=\"#333\">no production in this solution</text>\n</svg>\n";
    write_file_atomic(file, svg.str());
    return;
  }

  const std::map<std::string, std::string> colors = {
      {"digester", "#e67e22"},          {"feedstock_transport", "#f0a858"},
      {"upgrading", "#f6c98a"},         {"capture_compression", "#c0392b"},
      {"co2_trucking", "#d45d4e"},      {"sequestration", "#e08b80"},
      {"lcfs", "#27ae60"},              {"rin", "#58bd8a"},
      {"q45", "#8fd4b0"},               {"rng_sales", "#2980b9"}};

  double cost_total = 0.0, revenue_total = 0.0;
  for (const auto& [c, v] : sol.cost_breakdown) cost_total += v / total_gj;
  for (const auto& [c, v] : sol.revenue_breakdown) revenue_total += v / total_gj;
  double axis_max = std::max({cost_total, revenue_total, 1e-9}) * 1.1;

  double plot_h = 240, base_y = 290, bar_w = 110;
  auto bar = [&](double x0, bool is_cost) {
    double y = base_y;
    for (const auto& cat : ledger_categories()) {
      if (cat.is_cost != is_cost) continue;
      const auto& side = is_cost ? sol.cost_breakdown : sol.revenue_breakdown;
      auto it = side.find(cat.name);
      double v = (it == side.end() ? 0.0 : it->second) / total_gj;
      if (v <= 0) continue;
      double h = v / axis_max * plot_h;
      y -= h;
      svg << "<rect x=\"" << svg_num(x0) << "\" y=\"" << svg_num(y)
          << "\" width=\"" << bar_w << "\" height=\"" << svg_num(h)
          << "\" fill=\"" << colors.at(cat.name) << "\"><title>" << cat.name
          << ": " << format_number(v) << " $/GJ</title></rect>\n";
    }
    return y;
  };
  double cost_top = bar(90, true);
  double rev_top = bar(260, false);

  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  svg << "<text x=\"90\" y=\"310\">costs</text>\n";
  svg << "<text x=\"260\" y=\"310\">revenues</text>\n";
  svg << "<text x=\"90\" y=\"" << svg_num(cost_top - 6) << "\">"
      << format_number(cost_total) << " $/GJ</text>\n";
  svg << "<text x=\"260\" y=\"" << svg_num(rev_top - 6) << "\">"
      << format_number(revenue_total) << " $/GJ</text>\n";
  svg << "<text x=\"24\" y=\"24\">cost and revenue decomposition, $/GJ"
      << "</text>\n";
  svg << "<text x=\"24\" y=\"40\" font-size=\"10\">orange = biomass processing,"
      << " red = CCS chain, green/blue = credits and sales</text>\n";
  svg << "</g>\n</svg>\n";
  write_file_atomic(file, svg.str());
}

}  // namespace

ReportBundle emit_reports(const NetworkSolution& sol, const NetworkInstance& inst,
                          const std::filesystem::path& outdir) {
  check_solution_matches_instance(sol, inst);
  auto physical = check_solution(inst, sol, false);
  if (!physical.empty())
    throw InputError("refusing to report an incoherent solution: " +
                     physical.front());
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (!std::filesystem::is_directory(outdir))
    throw InputError("cannot create output directory " + outdir.string());

  ReportBundle bundle;
  bundle.solution_csv = outdir / "solution.csv";
  bundle.ledger_csv = outdir / "ledger.csv";
  bundle.network_geojson = outdir / "network.geojson";
  bundle.map_svg = outdir / "map.svg";
  bundle.bars_svg = outdir / "bars.svg";

  write_solution_csv(sol, bundle.solution_csv);
  write_ledger_csv(sol, bundle.ledger_csv);
  write_geojson(sol, inst, bundle.network_geojson);
  write_map_svg(sol, inst, bundle.map_svg);
  write_bars_svg(sol, bundle.bars_svg);
  return bundle;
}

}  // namespace rngccs
