#pragma once

#include <cstdint>

#include "rngccs/domain.hpp"

namespace rngccs {

// Size/shape knobs for the synthetic instance generator. The generated
// network mimics the real-world layout this model targets: urban waste
// sources clustered around a few centroids, digesters and gas-collection
// sites near them, sequestration sites out in non-urban cells.
struct GeneratorSpec {
  int n_sources = 24;
  int n_facilities = 8;
  int n_sinks = 3;
  int urban_cluster_count = 3;
  double cluster_radius_miles = 18.0;
  double supply_scale = 1.0;           // scales every source supply
  double transport_radius_miles = 50.0;
  BoundingBox bbox{34.0, 40.5, -122.5, -117.5};
};

// Deterministic: equal (seed, spec) pairs produce identical instances, and
// write_instance output is byte-identical across runs. Throws InputError for
// specs that cannot yield a usable network (facilities but no sinks).
NetworkInstance generate_synthetic(uint64_t seed, const GeneratorSpec& spec);

// The spec of the bundled demo instance (data/demo in the repo).
GeneratorSpec demo_spec();
inline constexpr uint64_t kDemoSeed = 42;
NetworkInstance demo_instance();

}  // namespace rngccs
