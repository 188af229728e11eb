#include "rngccs/report.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "rngccs/generator.hpp"
#include "rngccs/scenario.hpp"
#include "rngccs/util.hpp"

using namespace rngccs;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "rngccs_report" / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

RunResult solved_run(uint64_t seed = 17) {
  GeneratorSpec spec;
  spec.n_sources = 8;
  spec.n_facilities = 4;
  spec.n_sinks = 2;
  NetworkInstance inst = generate_synthetic(seed, spec);
  SolverConfig cfg;
  cfg.gap_tolerance = 0.0;
  return run_scenario(inst, builtin_scenario("baseline"), cfg);
}

NetworkInstance instance_for(uint64_t seed = 17) {
  GeneratorSpec spec;
  spec.n_sources = 8;
  spec.n_facilities = 4;
  spec.n_sinks = 2;
  return generate_synthetic(seed, spec);
}

// RFC 7946 structural rules we rely on.
void check_geojson_structure(const nlohmann::json& j) {
  REQUIRE(j.at("type") == "FeatureCollection");
  REQUIRE(j.contains("features"));
  for (const auto& f : j.at("features")) {
    REQUIRE(f.at("type") == "Feature");
    REQUIRE(f.contains("properties"));
    const auto& g = f.at("geometry");
    std::string t = g.at("type");
    REQUIRE((t == "Point" || t == "LineString"));
    if (t == "Point") {
      REQUIRE(g.at("coordinates").size() == 2);
      double lon = g.at("coordinates")[0];
      double lat = g.at("coordinates")[1];
      CHECK(lon >= -180.0);
      CHECK(lon <= 180.0);
      CHECK(lat >= -90.0);
      CHECK(lat <= 90.0);
    } else {
      REQUIRE(g.at("coordinates").size() >= 2);
      for (const auto& pos : g.at("coordinates")) REQUIRE(pos.size() == 2);
    }
  }
}

}  // namespace

TEST_CASE("all-zero solution renders points only") {
  NetworkInstance inst = instance_for();
  NetworkSolution zero;
  for (const auto& f : inst.facilities) {
    zero.facility_active[f.id] = false;
    zero.q45_eligible[f.id] = false;
    zero.biogas[f.id] = 0;
    zero.ch4[f.id] = 0;
    zero.co2_captured[f.id] = 0;
    zero.q45_credited[f.id] = 0;
  }
  for (const auto& k : inst.sinks) {
    zero.sink_active[k.id] = false;
    zero.co2_sequestered[k.id] = 0;
  }
  auto dir = fresh_dir("zero");
  auto bundle = emit_reports(zero, inst, dir);
  auto j = nlohmann::json::parse(slurp(bundle.network_geojson));
  check_geojson_structure(j);
  size_t points = 0, lines = 0;
  for (const auto& f : j.at("features")) {
    if (f.at("geometry").at("type") == "Point") ++points;
    else ++lines;
  }
  CHECK(points == inst.sources.size() + inst.facilities.size() + inst.sinks.size());
  CHECK(lines == 0);
}

TEST_CASE("solved run produces coherent artifacts") {
  auto run = solved_run();
  NetworkInstance inst = instance_for();
  auto dir = fresh_dir("solved");
  auto bundle = emit_reports(run.solution, inst, dir);

  auto j = nlohmann::json::parse(slurp(bundle.network_geojson));
  check_geojson_structure(j);

  // Line features match positive flows exactly, in both directions.
  size_t feed_lines = 0, co2_lines = 0;
  for (const auto& f : j.at("features")) {
    if (f.at("geometry").at("type") != "LineString") continue;
    const auto& p = f.at("properties");
    if (p.at("kind") == "feedstock_arc") {
      ++feed_lines;
      auto key = std::make_tuple(p.at("from").get<std::string>(),
                                 p.at("to").get<std::string>(),
                                 p.at("feedstock").get<std::string>());
      REQUIRE(run.solution.feedstock_flow.count(key) == 1);
      CHECK(run.solution.feedstock_flow.at(key) ==
            doctest::Approx(p.at("flow_wt_per_yr").get<double>()));
    } else {
      ++co2_lines;
      auto key = std::make_pair(p.at("from").get<std::string>(),
                                p.at("to").get<std::string>());
      REQUIRE(run.solution.co2_shipped.count(key) == 1);
    }
  }
  size_t positive_feed = 0;
  for (const auto& [k, v] : run.solution.feedstock_flow)
    positive_feed += v > 0 ? 1 : 0;
  size_t positive_co2 = 0;
  for (const auto& [k, v] : run.solution.co2_shipped)
    positive_co2 += v > 0 ? 1 : 0;
  CHECK(feed_lines == positive_feed);
  CHECK(co2_lines == positive_co2);
  REQUIRE(co2_lines > 0);

  // Ledger file: categories, groups, and dollar-per-GJ consistency.
  auto ledger = read_csv(bundle.ledger_csv,
                         {"category", "kind", "group", "dollars_per_year",
                          "dollars_per_gj", "share_of_kind"});
  REQUIRE(ledger.rows.size() == ledger_categories().size());
  double net = 0.0;
  for (const auto& row : ledger.rows) {
    double dollars = std::stod(row[3]);
    net += row[1] == "cost" ? -dollars : dollars;
    CHECK((row[2] == "biomass" || row[2] == "ccs" || row[2] == "revenue"));
  }
  CHECK(net == doctest::Approx(run.solution.objective)
                   .epsilon(1e-9)
                   .scale(std::abs(run.solution.objective) + 1));

  // SVGs exist and are self-contained.
  std::string map = slurp(bundle.map_svg);
  CHECK(map.find("<svg") == 0);
  CHECK(map.find("http://www.w3.org/2000/svg") != std::string::npos);
  CHECK(map.find("href") == std::string::npos);
  std::string bars = slurp(bundle.bars_svg);
  CHECK(bars.find("<svg") == 0);
  CHECK(bars.find("rect") != std::string::npos);
}

TEST_CASE("solution csv round trip and byte-identical regeneration") {
  auto run = solved_run(19);
  GeneratorSpec spec;
  spec.n_sources = 8;
  spec.n_facilities = 4;
  spec.n_sinks = 2;
  NetworkInstance inst = generate_synthetic(19, spec);

  auto dir1 = fresh_dir("emit1");
  auto dir2 = fresh_dir("emit2");
  auto b1 = emit_reports(run.solution, inst, dir1);
  auto b2 = emit_reports(run.solution, inst, dir2);
  for (const auto* name :
       {"solution.csv", "ledger.csv", "network.geojson", "map.svg", "bars.svg"})
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));

  // Regenerate from the saved solution file: identical bytes again.
  NetworkSolution loaded = read_solution_csv(b1.solution_csv);
  auto dir3 = fresh_dir("emit3");
  emit_reports(loaded, inst, dir3);
  for (const auto* name :
       {"solution.csv", "ledger.csv", "network.geojson", "map.svg", "bars.svg"})
    CHECK(slurp(dir1 / name) == slurp(dir3 / name));
  (void)b2;
}

TEST_CASE("mismatched solution and instance are rejected") {
  auto run = solved_run(23);
  NetworkInstance other = instance_for(23);
  other.facilities[0].id = "SOMETHING_ELSE";
  CHECK_THROWS_AS(emit_reports(run.solution, other, fresh_dir("mismatch")),
                  InputError);
}

TEST_CASE("incoherent solutions are refused") {
  NetworkInstance inst = instance_for(29);
  auto run = solved_run(29);
  NetworkSolution broken = run.solution;
  // Claim sequestration without inflow at some sink.
  broken.co2_sequestered[inst.sinks[0].id] += 1000.0;
  CHECK_THROWS_AS(emit_reports(broken, inst, fresh_dir("broken")), InputError);
}
