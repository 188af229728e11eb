#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rngccs/domain.hpp"

namespace rngccs {

// Mean Earth radius in statute miles; fixed so outputs are bit-reproducible.
inline constexpr double kEarthRadiusMiles = 3958.7613;

double haversine_miles(const LatLon& a, const LatLon& b);

struct RoadGraph {
  struct Node {
    std::string id;
    LatLon location;
  };
  struct Edge {
    int from = -1;
    int to = -1;
    double miles = 0.0;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;  // stored directed; undirected input adds both ways

  int node_index(const std::string& id) const;
};

// Directed shortest path in miles; nullopt when disconnected. Unknown node
// indices throw.
std::optional<double> shortest_path(const RoadGraph& graph, int from, int to);

// One-to-all Dijkstra; unreachable nodes hold nullopt.
std::vector<std::optional<double>> shortest_paths_from(const RoadGraph& graph,
                                                       int from);

enum class DistanceMode { Precomputed, GreatCircleCircuity, RoadGraph };

struct DistanceProvider {
  DistanceMode mode = DistanceMode::GreatCircleCircuity;
  double circuity_factor = 1.3;          // >= 1; GreatCircleCircuity only
  RoadGraph graph;                       // RoadGraph only
  double snap_tolerance_miles = 5.0;     // max entity-to-node distance
  // Precomputed mode: arcs supplied directly (same schema as the instance
  // bundle); entries beyond the radius are dropped, not errors.
  std::vector<DistArc> precomputed_sf;
  std::vector<DistArc> precomputed_fk;
};

struct DistanceMatrices {
  std::vector<DistArc> source_facility;
  std::vector<DistArc> facility_sink;
};

// Entry present iff computed distance <= radius, in statute miles.
DistanceMatrices build_matrices(const std::vector<FeedstockSource>& sources,
                                const std::vector<FacilitySite>& facilities,
                                const std::vector<SequestrationSite>& sinks,
                                const DistanceProvider& provider, double radius);

RoadGraph load_road_graph(const std::filesystem::path& nodes_csv,
                          const std::filesystem::path& edges_csv);

}  // namespace rngccs
