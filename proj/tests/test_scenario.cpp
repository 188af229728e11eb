#include "rngccs/scenario.hpp"

#include <cmath>

#include "doctest.h"
#include "rngccs/generator.hpp"
#include "rngccs/util.hpp"

using namespace rngccs;

namespace {

NetworkInstance unit_instance(uint64_t seed = 17) {
  GeneratorSpec spec;
  spec.n_sources = 8;
  spec.n_facilities = 4;
  spec.n_sinks = 2;
  return generate_synthetic(seed, spec);
}

SolverConfig exact() {
  SolverConfig cfg;
  cfg.gap_tolerance = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("metrics derive from the solution flows") {
  NetworkInstance inst = unit_instance();
  auto run = run_scenario(inst, builtin_scenario("baseline"), exact());
  const auto& m = run.metrics;
  CHECK(m.rng_pj == doctest::Approx(run.solution.total_ch4_gj() / 1e6));
  CHECK(m.co2_mt == doctest::Approx(run.solution.total_sequestered_t()));
  CHECK(m.n_facilities == run.solution.active_facility_count());
  CHECK(m.n_sinks == run.solution.active_sink_count());
  REQUIRE(m.rng_pj > 0);
  CHECK(m.profit_per_gj ==
        doctest::Approx(run.solution.objective / run.solution.total_ch4_gj()));
  // Breakdown shares sum to the per-GJ totals.
  double rev = 0.0;
  for (const auto& [cat, v] : m.revenue_per_gj) rev += v;
  double cost = 0.0;
  for (const auto& [cat, v] : m.cost_per_gj) cost += v;
  CHECK(rev - cost == doctest::Approx(m.profit_per_gj).epsilon(1e-9));
  // The ledger recomputed from raw flows agrees with the solver's books.
  auto led = recompute_ledger(inst, run.solution);
  CHECK(led.total() == doctest::Approx(run.solution.objective)
                           .epsilon(1e-9)
                           .scale(std::abs(run.solution.objective) + 1));
}

TEST_CASE("an unprofitable policy yields the all-zero network") {
  NetworkInstance inst = unit_instance();
  PolicyScenario barren = builtin_scenario("baseline");
  barren.name = "barren";
  barren.lcfs_price = 0;
  barren.rin_price = 0;
  barren.q45_price = 0;
  barren.rng_price = 0;
  auto run = run_scenario(inst, barren, exact());
  CHECK(run.metrics.n_facilities == 0);
  CHECK(run.metrics.rng_pj == 0.0);
  CHECK(std::isnan(run.metrics.profit_per_gj));
  CHECK(run.solution.objective == doctest::Approx(0.0));
}

TEST_CASE("policy dominance at exact optimality") {
  NetworkInstance inst = unit_instance(23);
  double high = run_scenario(inst, builtin_scenario("high_policy"), exact())
                    .solution.objective;
  double base = run_scenario(inst, builtin_scenario("baseline"), exact())
                    .solution.objective;
  double low = run_scenario(inst, builtin_scenario("low_policy"), exact())
                   .solution.objective;
  double open = run_scenario(inst, builtin_scenario("no_45q_threshold"), exact())
                    .solution.objective;
  double tol = 1e-7 * std::max(1.0, std::abs(high));
  CHECK(high >= base - tol);
  CHECK(base >= low - tol);
  CHECK(open >= base - tol);  // removing the threshold is a relaxation
}

TEST_CASE("lcfs price sweep is nondecreasing at exact optimality") {
  NetworkInstance inst = unit_instance(29);
  SweepSpec sweep;
  sweep.parameter = SweepParameter::LcfsPrice;
  sweep.values = {0.0, 100.0, 200.0};
  sweep.base_scenario = builtin_scenario("baseline");
  auto results = run_sweep(inst, sweep, exact());
  REQUIRE(results.size() == 3);
  for (size_t i = 1; i < results.size(); ++i) {
    double prev = results[i - 1].solution.objective;
    double cur = results[i].solution.objective;
    CHECK(cur >= prev - 1e-7 * std::max(1.0, std::abs(cur)));
  }
  CHECK(results[0].metrics.param_value == 0.0);
  CHECK(results[2].metrics.param_value == 200.0);
}

TEST_CASE("transport cost sweep is nonincreasing at exact optimality") {
  NetworkInstance inst = unit_instance(31);
  SweepSpec sweep;
  sweep.parameter = SweepParameter::TransportCostScale;
  sweep.values = {0.5, 1.0, 2.0};
  sweep.base_scenario = builtin_scenario("baseline");
  auto results = run_sweep(inst, sweep, exact());
  for (size_t i = 1; i < results.size(); ++i) {
    double prev = results[i - 1].solution.objective;
    double cur = results[i].solution.objective;
    CHECK(cur <= prev + 1e-7 * std::max(1.0, std::abs(prev)));
  }
}

TEST_CASE("repeated sweep values give identical metric rows") {
  NetworkInstance inst = unit_instance(37);
  SweepSpec sweep;
  sweep.parameter = SweepParameter::BiogasYieldScale;
  sweep.values = {1.0, 1.0};
  sweep.base_scenario = builtin_scenario("baseline");
  auto results = run_sweep(inst, sweep, exact());
  REQUIRE(results.size() == 2);
  CHECK(results[0].solution.objective == results[1].solution.objective);
  CHECK(results[0].metrics.rng_pj == results[1].metrics.rng_pj);
  CHECK(results[0].metrics.n_facilities == results[1].metrics.n_facilities);
}

TEST_CASE("yield sweep propagates through the stoichiometry") {
  NetworkInstance inst = unit_instance(41);
  SweepSpec sweep;
  sweep.parameter = SweepParameter::BiogasYieldScale;
  sweep.values = {0.5, 1.0, 1.5};
  sweep.base_scenario = builtin_scenario("baseline");
  auto results = run_sweep(inst, sweep, exact());
  // More gas per ton never hurts.
  for (size_t i = 1; i < results.size(); ++i)
    CHECK(results[i].solution.objective >=
          results[i - 1].solution.objective -
              1e-7 * std::max(1.0, results[i].solution.objective));
}

TEST_CASE("metrics csv excludes only wall time from reproducibility") {
  NetworkInstance inst = unit_instance(43);
  auto run1 = run_scenario(inst, builtin_scenario("baseline"), exact());
  auto run2 = run_scenario(inst, builtin_scenario("baseline"), exact());
  auto dir = std::filesystem::temp_directory_path() / "rngccs_scenario";
  std::filesystem::create_directories(dir);
  write_metrics_csv(dir / "a.csv", {run1.metrics});
  write_metrics_csv(dir / "b.csv", {run2.metrics});
  auto ta = read_csv(dir / "a.csv",
                     {"scenario", "param_value", "lcfs_price", "rin_price",
                      "q45_price", "q45_threshold", "rng_pj", "co2_mt",
                      "n_facilities", "n_sinks", "profit_per_gj", "gap", "wall_s"});
  auto tb = read_csv(dir / "b.csv",
                     {"scenario", "param_value", "lcfs_price", "rin_price",
                      "q45_price", "q45_threshold", "rng_pj", "co2_mt",
                      "n_facilities", "n_sinks", "profit_per_gj", "gap", "wall_s"});
  REQUIRE(ta.rows.size() == tb.rows.size());
  for (size_t r = 0; r < ta.rows.size(); ++r)
    for (size_t c = 0; c + 1 < ta.rows[r].size(); ++c)  // all but wall_s
      CHECK(ta.rows[r][c] == tb.rows[r][c]);
}

TEST_CASE("fixed-gas-only networks run without feedstock arcs") {
  // Landfill sites with no digesters reachable: gas still upgrades and the
  // CO2 still ships.
  NetworkInstance inst;
  inst.bbox = {35.0, 37.0, -121.0, -119.0};
  inst.feedstock_types = {{"food_waste", 120.0, 0.60}};
  FacilitySite lfg;
  lfg.id = "F1";
  lfg.location = {36.0, -120.0};
  lfg.kind = FacilityKind::LandfillGas;
  lfg.fixed_biogas = 40e6;
  lfg.fixed_cost = 200000;
  inst.facilities = {lfg};
  SequestrationSite sink;
  sink.id = "K1";
  sink.location = {36.2, -120.1};
  sink.capacity = 1e6;
  sink.fixed_cost = 150000;
  sink.unit_cost = 1.35;
  inst.sinks = {sink};
  inst.dist_facility_sink = {{0, 0, 18.0}};

  auto run = run_scenario(inst, builtin_scenario("baseline"), exact());
  CHECK(run.metrics.n_facilities == 1);
  CHECK(run.solution.biogas.at("F1") == doctest::Approx(40e6));
  CHECK(run.solution.total_sequestered_t() > 0);
  CHECK(run.metrics.rng_pj > 0);
}

TEST_CASE("strict mass balance disables facilities with no sink reach") {
  NetworkInstance inst;
  inst.bbox = {35.0, 37.0, -121.0, -119.0};
  inst.feedstock_types = {{"food_waste", 120.0, 0.60}};
  FacilitySite lfg;
  lfg.id = "F1";
  lfg.location = {36.0, -120.0};
  lfg.kind = FacilityKind::LandfillGas;
  lfg.fixed_biogas = 40e6;
  lfg.fixed_cost = 1000;  // cheap: attractive if it could run
  inst.facilities = {lfg};
  SequestrationSite sink;
  sink.id = "K1";
  sink.location = {36.2, -120.1};
  sink.capacity = 1e6;
  sink.fixed_cost = 150000;
  sink.unit_cost = 1.35;
  inst.sinks = {sink};
  // No facility->sink arc: captured CO2 has nowhere to go.

  RunOptions strict;
  strict.build.strict_mass_balance = true;
  auto gated = run_scenario(inst, builtin_scenario("baseline"), exact(), strict);
  CHECK(gated.metrics.n_facilities == 0);
  CHECK(gated.solution.objective == doctest::Approx(0.0));

  // Venting allowed: the site runs and vents.
  auto vented = run_scenario(inst, builtin_scenario("baseline"), exact());
  CHECK(vented.metrics.n_facilities == 1);
  CHECK(vented.solution.total_sequestered_t() == 0.0);
}

TEST_CASE("remaining price sweeps are monotone at exact optimality") {
  NetworkInstance inst = unit_instance(53);
  for (auto param : {SweepParameter::Q45Price, SweepParameter::RngPrice,
                     SweepParameter::RinPrice}) {
    SweepSpec sweep;
    sweep.parameter = param;
    sweep.values = param == SweepParameter::RngPrice
                       ? std::vector<double>{0.0, 6.0, 12.0}
                       : std::vector<double>{0.0, 50.0, 100.0};
    sweep.base_scenario = builtin_scenario("baseline");
    auto results = run_sweep(inst, sweep, exact());
    for (size_t i = 1; i < results.size(); ++i)
      CHECK(results[i].solution.objective >=
            results[i - 1].solution.objective -
                1e-7 * std::max(1.0, std::abs(results[i].solution.objective)));
  }
}

TEST_CASE("demo baseline ledger recomputes exactly from raw flows") {
  NetworkInstance demo = demo_instance();
  REQUIRE(demo.facilities.size() == 8);
  auto run = run_scenario(demo, builtin_scenario("baseline"), exact());
  auto led = recompute_ledger(demo, run.solution);
  CHECK(led.total() == doctest::Approx(run.solution.objective)
                           .epsilon(1e-9)
                           .scale(std::abs(run.solution.objective) + 1));
  // Category-by-category agreement between the model attribution and the
  // instance-level recomputation.
  for (const auto& [cat, v] : run.solution.revenue_breakdown)
    CHECK(led.revenue.at(cat) ==
          doctest::Approx(v).epsilon(1e-9).scale(std::abs(v) + 1));
  for (const auto& [cat, v] : run.solution.cost_breakdown)
    CHECK(led.cost.at(cat) ==
          doctest::Approx(v).epsilon(1e-9).scale(std::abs(v) + 1));
}

TEST_CASE("sweep warm starts do not move certified optima") {
  NetworkInstance inst = unit_instance(59);
  SweepSpec sweep;
  sweep.parameter = SweepParameter::BiogasYieldScale;
  sweep.values = {0.8, 1.0, 1.2};
  sweep.base_scenario = builtin_scenario("baseline");
  auto chained = run_sweep(inst, sweep, exact());
  for (size_t i = 0; i < sweep.values.size(); ++i) {
    NetworkInstance fresh = inst;
    for (auto& t : fresh.feedstock_types) t.biogas_yield *= sweep.values[i];
    auto solo = run_scenario(fresh, sweep.base_scenario, exact());
    double scale = std::max(1.0, std::abs(solo.solution.objective));
    CHECK(std::abs(chained[i].solution.objective - solo.solution.objective) /
              scale <
          1e-9);
  }
}

TEST_CASE("sweep rejects empty or unknown parameters") {
  NetworkInstance inst = unit_instance(47);
  SweepSpec sweep;
  sweep.values = {};
  CHECK_THROWS_AS(run_sweep(inst, sweep, exact()), InputError);
  CHECK_THROWS_AS(sweep_parameter_from_string("warp_factor"), InputError);
  CHECK(sweep_parameter_from_string("lcfs_price") == SweepParameter::LcfsPrice);
}
