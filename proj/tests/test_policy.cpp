#include "rngccs/policy.hpp"

#include <cmath>

#include "doctest.h"
#include "rngccs/util.hpp"

using namespace rngccs;

TEST_CASE("builtin scenario table") {
  auto all = builtin_scenarios();
  REQUIRE(all.size() == 5);
  CHECK(all[0].name == "baseline");
  CHECK(all[0].lcfs_price == 100.0);
  CHECK(all[0].rin_price == 0.25);
  CHECK(all[0].q45_price == 50.0);
  CHECK(all[0].q45_threshold == 100000.0);

  CHECK(all[1].name == "no_rfs");
  CHECK(all[1].rin_price == 0.0);
  CHECK(all[1].lcfs_price == 100.0);

  CHECK(all[2].name == "no_45q_threshold");
  CHECK(all[2].q45_threshold == 0.0);
  CHECK(all[2].rin_price == 0.25);

  CHECK(all[3].name == "high_policy");
  CHECK(all[3].lcfs_price == 200.0);
  CHECK(all[3].rin_price == 1.50);
  CHECK(all[3].q45_price == 50.0);

  CHECK(all[4].name == "low_policy");
  CHECK(all[4].lcfs_price == 20.0);
  CHECK(all[4].rin_price == 0.0);
  CHECK(all[4].q45_threshold == 100000.0);

  // All other knobs shared across the five.
  for (const auto& s : all) {
    CHECK(s.rng_price == all[0].rng_price);
    CHECK(s.benchmark_ci == all[0].benchmark_ci);
    CHECK(s.truck_ef == all[0].truck_ef);
  }
}

TEST_CASE("builtin lookup is forgiving about case and dashes") {
  CHECK(builtin_scenario("Baseline").name == "baseline");
  CHECK(builtin_scenario("no-rfs").name == "no_rfs");
  CHECK(builtin_scenario("HIGH_POLICY").lcfs_price == 200.0);
  CHECK_THROWS_WITH_AS(builtin_scenario("nope"), doctest::Contains("baseline"),
                       InputError);
}

TEST_CASE("lcfs credits: zero, sequestration add-on, trucking penalty") {
  PolicyScenario s;
  CHECK(lcfs_credit_tonnes(0, "food_waste", 0, 0, 0, s) == 0.0);

  // Pure sequestration add-on: one credit per tonne delivered.
  CHECK(lcfs_credit_tonnes(0, "food_waste", 1000.0, 0, 0, s) ==
        doctest::Approx(1000.0));

  // 1000 ton-miles of trucking at 161.8 g/ton-mile.
  CHECK(lcfs_credit_tonnes(0, "food_waste", 0, 1000.0, 0, s) ==
        doctest::Approx(-0.1618).epsilon(1e-9));

  CHECK_THROWS_AS(lcfs_credit_tonnes(1, "unobtainium", 0, 0, 0, s), InputError);
}

TEST_CASE("lcfs credits are linear in every physical argument") {
  PolicyScenario s;
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    double e1 = rng.uniform(0, 1e6), e2 = rng.uniform(0, 1e6);
    double q1 = rng.uniform(0, 1e5), q2 = rng.uniform(0, 1e5);
    double tm1 = rng.uniform(0, 1e6), tm2 = rng.uniform(0, 1e6);
    double c1 = rng.uniform(0, 1e5), c2 = rng.uniform(0, 1e5);
    double sum = lcfs_credit_tonnes(e1 + e2, "manure", q1 + q2, tm1 + tm2,
                                    c1 + c2, s);
    double parts = lcfs_credit_tonnes(e1, "manure", q1, tm1, c1, s) +
                   lcfs_credit_tonnes(e2, "manure", q2, tm2, c2, s);
    CHECK(sum == doctest::Approx(parts).epsilon(1e-12));
  }
}

TEST_CASE("grid and trucking factors can be switched off") {
  PolicyScenario s;
  s.grid_ci = 0.0;
  s.truck_ef = 0.0;
  double base = lcfs_credit_tonnes(1000.0, "grease", 50.0, 0.0, 0.0, s);
  CHECK(lcfs_credit_tonnes(1000.0, "grease", 50.0, 1e9, 1e9, s) ==
        doctest::Approx(base));
}

TEST_CASE("rin revenue converts through gallon gasoline equivalents") {
  PolicyScenario s;  // 0.25 $/GGE, 0.08124 GJ/GGE
  CHECK(rin_revenue(0, s) == 0.0);
  CHECK(rin_revenue(81.24, s) == doctest::Approx(250.0).epsilon(1e-12));
  PolicyScenario dbl = s;
  dbl.rin_price *= 2;
  CHECK(rin_revenue(81.24, dbl) == doctest::Approx(500.0).epsilon(1e-12));
}

TEST_CASE("q45 terms extract price and threshold") {
  auto base = q45_terms(builtin_scenario("baseline"));
  CHECK(base.price == 50.0);
  CHECK(base.threshold == 100000.0);
  auto open = q45_terms(builtin_scenario("no_45q_threshold"));
  CHECK(open.price == 50.0);
  CHECK(open.threshold == 0.0);
}

TEST_CASE("price dominance holds pointwise for fixed flows") {
  auto all = builtin_scenarios();
  const auto& baseline = all[0];
  const auto& high = all[3];
  const auto& low = all[4];

  // A representative positive flow bundle.
  double gj = 5e5, seq = 2e4, ton_miles = 4e5, captured = 2.2e4;
  auto revenue = [&](const PolicyScenario& s) {
    double credits =
        lcfs_credit_tonnes(gj, "food_waste", seq, ton_miles, captured, s);
    return s.lcfs_price * credits + rin_revenue(gj, s) + s.rng_price * gj +
           s.q45_price * seq;
  };
  CHECK(revenue(high) >= revenue(baseline));
  CHECK(revenue(baseline) >= revenue(low));
}

TEST_CASE("policy warnings flag pathways at or above the benchmark") {
  PolicyScenario s;
  CHECK(policy_warnings(s).empty());
  s.pathway_ci["manure"] = s.benchmark_ci + 5.0;
  auto warnings = policy_warnings(s);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("manure") != std::string::npos);
  // Warn, don't reject: hard validation still passes.
  CHECK(validate_policy(s).empty());
}

TEST_CASE("policy invariants reject negative prices") {
  PolicyScenario s;
  s.lcfs_price = -1;
  CHECK(!validate_policy(s).empty());
  s = PolicyScenario{};
  s.q45_threshold = -5;
  CHECK(!validate_policy(s).empty());
}
