#include "rngccs/routing.hpp"

#include <cmath>
#include <queue>

#include "rngccs/util.hpp"

namespace rngccs {

double haversine_miles(const LatLon& a, const LatLon& b) {
  constexpr double deg = M_PI / 180.0;
  double dlat = (b.lat - a.lat) * deg;
  double dlon = (b.lon - a.lon) * deg;
  double s1 = std::sin(dlat / 2), s2 = std::sin(dlon / 2);
  double h = s1 * s1 + std::cos(a.lat * deg) * std::cos(b.lat * deg) * s2 * s2;
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

int RoadGraph::node_index(const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<std::optional<double>> shortest_paths_from(const RoadGraph& graph,
                                                       int from) {
  if (from < 0 || from >= static_cast<int>(graph.nodes.size()))
    throw InputError("unknown road-graph node index " + std::to_string(from));

  std::vector<std::vector<std::pair<int, double>>> adj(graph.nodes.size());
  for (const auto& e : graph.edges) adj[e.from].push_back({e.to, e.miles});

  std::vector<double> dist(graph.nodes.size(),
                           std::numeric_limits<double>::infinity());
  dist[from] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, from});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (auto [v, w] : adj[u]) {
      double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }

  std::vector<std::optional<double>> out(graph.nodes.size());
  for (size_t i = 0; i < dist.size(); ++i)
    if (std::isfinite(dist[i])) out[i] = dist[i];
  return out;
}

std::optional<double> shortest_path(const RoadGraph& graph, int from, int to) {
  if (to < 0 || to >= static_cast<int>(graph.nodes.size()))
    throw InputError("unknown road-graph node index " + std::to_string(to));
  return shortest_paths_from(graph, from)[to];
}

namespace {

int snap_to_graph(const RoadGraph& g, const LatLon& p, double tolerance,
                  const std::string& entity_id) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    double d = haversine_miles(p, g.nodes[i].location);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  if (best < 0 || best_d > tolerance)
    throw InputError("entity '" + entity_id + "' is " + format_number(best_d) +
                     " miles from the nearest road-graph node (snap tolerance " +
                     format_number(tolerance) + ")");
  return best;
}

}  // namespace

DistanceMatrices build_matrices(const std::vector<FeedstockSource>& sources,
                                const std::vector<FacilitySite>& facilities,
                                const std::vector<SequestrationSite>& sinks,
                                const DistanceProvider& provider, double radius) {
  if (!(radius > 0)) throw InputError("transport radius must be > 0");
  if (provider.mode == DistanceMode::GreatCircleCircuity &&
      !(provider.circuity_factor >= 1.0))
    throw InputError("circuity_factor must be >= 1");

  DistanceMatrices out;

  if (provider.mode == DistanceMode::Precomputed) {
    for (const auto& a : provider.precomputed_sf)
      if (a.miles <= radius) out.source_facility.push_back(a);
    for (const auto& a : provider.precomputed_fk)
      if (a.miles <= radius) out.facility_sink.push_back(a);
    return out;
  }

  if (provider.mode == DistanceMode::GreatCircleCircuity) {
    for (size_t i = 0; i < sources.size(); ++i)
      for (size_t j = 0; j < facilities.size(); ++j) {
        double d = provider.circuity_factor *
                   haversine_miles(sources[i].location, facilities[j].location);
        if (d <= radius)
          out.source_facility.push_back(
              {static_cast<int>(i), static_cast<int>(j), d});
      }
    for (size_t j = 0; j < facilities.size(); ++j)
      for (size_t k = 0; k < sinks.size(); ++k) {
        double d = provider.circuity_factor *
                   haversine_miles(facilities[j].location, sinks[k].location);
        if (d <= radius)
          out.facility_sink.push_back(
              {static_cast<int>(j), static_cast<int>(k), d});
      }
    return out;
  }

  // RoadGraph: snap every entity, then run one Dijkstra per origin node.
  const RoadGraph& g = provider.graph;
  for (const auto& e : g.edges)
    if (!(e.miles > 0)) throw InputError("road-graph edges must have positive length");

  std::vector<int> src_node(sources.size()), fac_node(facilities.size()),
      sink_node(sinks.size());
  for (size_t i = 0; i < sources.size(); ++i)
    src_node[i] = snap_to_graph(g, sources[i].location,
                                provider.snap_tolerance_miles, sources[i].id);
  for (size_t j = 0; j < facilities.size(); ++j)
    fac_node[j] = snap_to_graph(g, facilities[j].location,
                                provider.snap_tolerance_miles, facilities[j].id);
  for (size_t k = 0; k < sinks.size(); ++k)
    sink_node[k] = snap_to_graph(g, sinks[k].location,
                                 provider.snap_tolerance_miles, sinks[k].id);

  for (size_t i = 0; i < sources.size(); ++i) {
    auto dist = shortest_paths_from(g, src_node[i]);
    for (size_t j = 0; j < facilities.size(); ++j) {
      auto d = dist[fac_node[j]];
      if (d && *d <= radius)
        out.source_facility.push_back(
            {static_cast<int>(i), static_cast<int>(j), *d});
    }
  }
  for (size_t j = 0; j < facilities.size(); ++j) {
    auto dist = shortest_paths_from(g, fac_node[j]);
    for (size_t k = 0; k < sinks.size(); ++k) {
      auto d = dist[sink_node[k]];
      if (d && *d <= radius)
        out.facility_sink.push_back(
            {static_cast<int>(j), static_cast<int>(k), *d});
    }
  }
  return out;
}

RoadGraph load_road_graph(const std::filesystem::path& nodes_csv,
                          const std::filesystem::path& edges_csv) {
  RoadGraph g;
  auto nodes = read_csv(nodes_csv, {"id", "lat", "lon"});
  for (size_t r = 0; r < nodes.rows.size(); ++r) {
    const auto& row = nodes.rows[r];
    RoadGraph::Node n;
    n.id = row[0];
    n.location.lat = parse_double_field(row[1], nodes_csv.string(), "lat", r + 1);
    n.location.lon = parse_double_field(row[2], nodes_csv.string(), "lon", r + 1);
    if (g.node_index(n.id) >= 0)
      throw InputError(nodes_csv.string() + ": duplicate node id '" + n.id + "'");
    g.nodes.push_back(std::move(n));
  }
  auto edges = read_csv(edges_csv, {"from", "to", "miles", "directed"});
  for (size_t r = 0; r < edges.rows.size(); ++r) {
    const auto& row = edges.rows[r];
    int from = g.node_index(row[0]);
    int to = g.node_index(row[1]);
    if (from < 0 || to < 0)
      throw InputError(edges_csv.string() + " row " + std::to_string(r + 1) +
                       ": unknown node id '" + (from < 0 ? row[0] : row[1]) + "'");
    double miles = parse_double_field(row[2], edges_csv.string(), "miles", r + 1);
    if (!(miles > 0))
      throw InputError(edges_csv.string() + " row " + std::to_string(r + 1) +
                       ": edge length must be positive");
    bool directed = row[3] == "1" || lower(row[3]) == "true";
    g.edges.push_back({from, to, miles});
    if (!directed) g.edges.push_back({to, from, miles});
  }
  return g;
}

}  // namespace rngccs
