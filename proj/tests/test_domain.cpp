#include "rngccs/domain.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rngccs/generator.hpp"
#include "rngccs/instance_io.hpp"
#include "rngccs/routing.hpp"
#include "rngccs/util.hpp"

using namespace rngccs;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "rngccs_domain" / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool bundles_identical(const std::filesystem::path& a,
                       const std::filesystem::path& b) {
  for (const auto* f :
       {"sources.csv", "facilities.csv", "sinks.csv", "feedstock_types.csv",
        "dist_sf.csv", "dist_fk.csv", "params.txt"}) {
    if (slurp(a / f) != slurp(b / f)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generator output validates clean and loads back identically") {
  GeneratorSpec spec;
  spec.n_sources = 9;
  spec.n_facilities = 4;
  spec.n_sinks = 2;
  NetworkInstance inst = generate_synthetic(7, spec);
  CHECK(validate(inst).empty());
  CHECK(inst.sources.size() == 9);
  CHECK(inst.facilities.size() == 4);
  CHECK(inst.sinks.size() == 2);

  auto dir = fresh_dir("roundtrip");
  write_instance(inst, dir);
  NetworkInstance back = load_instance(dir);
  CHECK(back.sources.size() == inst.sources.size());
  CHECK(back.facilities.size() == inst.facilities.size());
  CHECK(back.dist_source_facility.size() == inst.dist_source_facility.size());
  for (size_t i = 0; i < inst.sources.size(); ++i) {
    CHECK(back.sources[i].id == inst.sources[i].id);
    CHECK(back.sources[i].supply == inst.sources[i].supply);
    CHECK(back.sources[i].feedstock == inst.sources[i].feedstock);
  }
  for (size_t j = 0; j < inst.facilities.size(); ++j) {
    CHECK(back.facilities[j].kind == inst.facilities[j].kind);
    CHECK(back.facilities[j].fixed_cost == inst.facilities[j].fixed_cost);
  }
  CHECK(back.policy.lcfs_price == inst.policy.lcfs_price);
  CHECK(back.params.capture_efficiency == inst.params.capture_efficiency);

  // Writing the re-read instance reproduces the bundle byte for byte.
  auto dir2 = fresh_dir("roundtrip2");
  write_instance(back, dir2);
  CHECK(bundles_identical(dir, dir2));
}

TEST_CASE("generator is deterministic in the seed and sensitive to it") {
  GeneratorSpec spec;
  spec.n_sources = 6;
  spec.n_facilities = 4;
  spec.n_sinks = 2;
  auto d1 = fresh_dir("seed1a");
  auto d2 = fresh_dir("seed1b");
  auto d3 = fresh_dir("seed2");
  write_instance(generate_synthetic(1, spec), d1);
  write_instance(generate_synthetic(1, spec), d2);
  write_instance(generate_synthetic(2, spec), d3);
  CHECK(bundles_identical(d1, d2));
  CHECK(!bundles_identical(d1, d3));
}

TEST_CASE("urban waste sources cluster around centroids") {
  GeneratorSpec spec;
  spec.n_sources = 120;
  spec.n_facilities = 6;
  spec.n_sinks = 3;
  spec.urban_cluster_count = 3;
  NetworkInstance inst = generate_synthetic(11, spec);

  // Recover the centroids from facility placement: every facility sits
  // within 8 miles of its centroid, so use them as anchors.
  auto is_urban = [](const std::string& t) {
    return t == "food_waste" || t == "green_waste" || t == "grease";
  };
  int urban = 0, within = 0;
  for (const auto& s : inst.sources) {
    if (!is_urban(s.feedstock)) continue;
    ++urban;
    for (const auto& f : inst.facilities) {
      if (haversine_miles(s.location, f.location) <=
          spec.cluster_radius_miles + 8.0) {
        ++within;
        break;
      }
    }
  }
  REQUIRE(urban > 0);
  CHECK(static_cast<double>(within) / urban >= 0.90);
}

TEST_CASE("generator rejects facilities without sinks") {
  GeneratorSpec spec;
  spec.n_facilities = 3;
  spec.n_sinks = 0;
  CHECK_THROWS_AS(generate_synthetic(1, spec), InputError);
}

TEST_CASE("validate names the offending entity and rule") {
  NetworkInstance inst = generate_synthetic(3, GeneratorSpec{});
  SUBCASE("negative supply") {
    inst.sources[0].supply = -5;
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].entity == inst.sources[0].id);
    CHECK(v[0].field == "supply");
  }
  SUBCASE("landfill with intake capacity") {
    for (auto& f : inst.facilities) {
      if (f.kind == FacilityKind::LandfillGas) {
        f.capacity = 100.0;
        break;
      }
    }
    auto v = validate(inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "capacity");
    CHECK(v[0].rule.find("landfill_gas") != std::string::npos);
  }
  SUBCASE("over-radius arc") {
    inst.dist_source_facility[0].miles = 60.0;
    auto v = validate(inst);
    REQUIRE(!v.empty());
    CHECK(v[0].rule.find("transport radius") != std::string::npos);
  }
  SUBCASE("methane fraction out of range") {
    inst.feedstock_types[0].methane_fraction = 1.0;
    CHECK(!validate(inst).empty());
  }
}

TEST_CASE("loading rejects dangling references and radius violations") {
  NetworkInstance inst = generate_synthetic(5, GeneratorSpec{});
  auto dir = fresh_dir("badbundle");
  write_instance(inst, dir);

  SUBCASE("unknown feedstock type") {
    // Rewrite sources.csv with a bogus type on the first row.
    auto t = read_csv(dir / "sources.csv",
                      {"id", "lat", "lon", "feedstock", "supply_wt_per_yr"});
    t.rows[0][3] = "mystery_goo";
    write_csv(dir / "sources.csv", t.header, t.rows);
    CHECK_THROWS_WITH_AS(load_instance(dir),
                         doctest::Contains("mystery_goo"), InputError);
  }
  SUBCASE("distance beyond the radius") {
    auto t = read_csv(dir / "dist_sf.csv", {"source_id", "facility_id", "miles"});
    t.rows[0][2] = "60";
    write_csv(dir / "dist_sf.csv", t.header, t.rows);
    CHECK_THROWS_WITH_AS(load_instance(dir), doctest::Contains("radius"),
                         InputError);
  }
  SUBCASE("unknown column") {
    std::ofstream f(dir / "sinks.csv");
    f << "id,lat,lon,capacity_t_per_yr,fixed_cost_per_yr,unit_cost_per_t,bogus\n";
    f.close();
    CHECK_THROWS_WITH_AS(load_instance(dir), doctest::Contains("bogus"),
                         InputError);
  }
}

TEST_CASE("a bundle missing a file fails to load") {
  NetworkInstance inst = generate_synthetic(5, GeneratorSpec{});
  auto dir = fresh_dir("missingfile");
  write_instance(inst, dir);
  std::filesystem::remove(dir / "sinks.csv");
  CHECK_THROWS_AS(load_instance(dir), InputError);
  CHECK_THROWS_AS(load_instance(dir / "not_there"), InputError);
}

TEST_CASE("policy overrides in the params file apply on top") {
  NetworkInstance inst = generate_synthetic(5, GeneratorSpec{});
  auto dir = fresh_dir("overrides");
  write_instance(inst, dir);
  {
    std::ofstream f(dir / "params.txt", std::ios::app);
    f << "\n[policy.overrides]\nlcfs_price_per_t = 123\n";
  }
  NetworkInstance back = load_instance(dir);
  CHECK(back.policy.lcfs_price == 123.0);
}
