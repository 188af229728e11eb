#include "rngccs/technoeconomics.hpp"

#include <cmath>

#include "doctest.h"
#include "rngccs/generator.hpp"
#include "rngccs/util.hpp"

using namespace rngccs;

TEST_CASE("capital recovery factor matches the closed form") {
  // Frozen from an independent evaluation of r(1+r)^n/((1+r)^n - 1).
  CHECK(capital_recovery_factor(0.10, 15) == doctest::Approx(0.131474).epsilon(1e-5));
  CHECK(std::abs(capital_recovery_factor(0.10, 15) - 0.13147377688737) < 1e-12);
  // Single period annuity: principal plus interest.
  CHECK(capital_recovery_factor(0.07, 1) == doctest::Approx(1.07));
  CHECK(capital_recovery_factor(0.25, 1) == doctest::Approx(1.25));
  // Long-horizon limit approaches the rate itself.
  CHECK(std::abs(capital_recovery_factor(0.10, 500) - 0.10) < 1e-6);
  // Annualizing $1M of capital.
  CHECK(1e6 * capital_recovery_factor(0.10, 15) ==
        doctest::Approx(131474.0).epsilon(1e-5));
}

TEST_CASE("biogas from feedstock is a linear yield sum") {
  NetworkInstance inst = generate_synthetic(1, GeneratorSpec{});
  CHECK(biogas_from_feedstock({}, inst) == 0.0);

  double y_food = 0.0;
  for (const auto& t : inst.feedstock_types)
    if (t.id == "food_waste") y_food = t.biogas_yield;
  REQUIRE(y_food > 0);
  CHECK(biogas_from_feedstock({{"food_waste", 100.0}}, inst) ==
        doctest::Approx(100.0 * y_food));

  double two = biogas_from_feedstock({{"food_waste", 50.0}, {"manure", 80.0}}, inst);
  double sum = biogas_from_feedstock({{"food_waste", 50.0}}, inst) +
               biogas_from_feedstock({{"manure", 80.0}}, inst);
  CHECK(two == doctest::Approx(sum));

  CHECK_THROWS_AS(biogas_from_feedstock({{"plutonium", 1.0}}, inst), InputError);
}

TEST_CASE("upgrade split at the default constants") {
  TechnoEconomicParams p;
  auto zero = upgrade_split(0.0, 0.6, p);
  CHECK(zero.ch4_energy_gj == 0.0);
  CHECK(zero.co2_captured_t == 0.0);

  // 1e6 m3 at 60% methane: 1e6*0.6*0.0378 GJ and 1e6*0.4*0.001836*0.95 t.
  auto s = upgrade_split(1e6, 0.6, p);
  CHECK(s.ch4_energy_gj == doctest::Approx(22680.0).epsilon(1e-12));
  CHECK(s.co2_captured_t == doctest::Approx(697.68).epsilon(1e-12));

  auto pure = upgrade_split(1e6, 1.0, p);
  CHECK(pure.co2_captured_t == 0.0);
}

TEST_CASE("upgrade split conserves biogas volume before capture losses") {
  TechnoEconomicParams p;
  for (double mf : {0.4, 0.6, 0.85}) {
    double biogas = 123456.0;
    auto s = upgrade_split(biogas, mf, p);
    double ch4_volume = s.ch4_energy_gj / p.ch4_lhv;
    double co2_volume = s.co2_captured_t / (p.co2_density * p.capture_efficiency);
    CHECK(ch4_volume + co2_volume == doctest::Approx(biogas).epsilon(1e-12));
  }
}

TEST_CASE("operations are positively homogeneous in physical inputs") {
  TechnoEconomicParams p;
  NetworkInstance inst = generate_synthetic(2, GeneratorSpec{});
  double lambda = 3.7;
  auto s1 = upgrade_split(1000.0, 0.6, p);
  auto s2 = upgrade_split(lambda * 1000.0, 0.6, p);
  CHECK(s2.ch4_energy_gj == doctest::Approx(lambda * s1.ch4_energy_gj));
  CHECK(s2.co2_captured_t == doctest::Approx(lambda * s1.co2_captured_t));
  double b1 = biogas_from_feedstock({{"manure", 10.0}}, inst);
  double b2 = biogas_from_feedstock({{"manure", 10.0 * lambda}}, inst);
  CHECK(b2 == doctest::Approx(lambda * b1));
}

TEST_CASE("cost coefficients follow the fixed-plus-mileage form") {
  NetworkInstance inst = generate_synthetic(3, GeneratorSpec{});
  inst.params.feedstock_transport_fixed = 4.0;
  inst.params.feedstock_transport_per_mile = 0.12;
  inst.dist_source_facility[0].miles = 20.0;
  CostModel cm = cost_coefficients(inst);
  CHECK(cm.feedstock_arc_cost[0] == doctest::Approx(6.40));

  inst.dist_source_facility[0].miles = 0.0;
  cm = cost_coefficients(inst);
  CHECK(cm.feedstock_arc_cost[0] == doctest::Approx(4.0));

  // Doubling distances doubles only the variable share.
  NetworkInstance doubled = inst;
  for (auto& a : doubled.dist_source_facility) a.miles *= 2;
  for (auto& a : doubled.dist_facility_sink) a.miles *= 2;
  CostModel cm2 = cost_coefficients(doubled);
  for (size_t a = 0; a < cm.feedstock_arc_cost.size(); ++a) {
    double fixed = inst.params.feedstock_transport_fixed;
    CHECK(cm2.feedstock_arc_cost[a] - fixed ==
          doctest::Approx(2.0 * (cm.feedstock_arc_cost[a] - fixed)));
  }
  CHECK(cm.facility_fixed == cost_coefficients(doubled).facility_fixed);
}

TEST_CASE("all cost coefficients are nonnegative and finite") {
  NetworkInstance inst = generate_synthetic(4, GeneratorSpec{});
  CostModel cm = cost_coefficients(inst);
  auto all_good = [](const std::vector<double>& v) {
    for (double x : v)
      if (!(x >= 0) || !std::isfinite(x)) return false;
    return true;
  };
  CHECK(all_good(cm.facility_fixed));
  CHECK(all_good(cm.facility_processing));
  CHECK(all_good(cm.feedstock_arc_cost));
  CHECK(all_good(cm.co2_arc_cost));
  CHECK(all_good(cm.sink_fixed));
  CHECK(all_good(cm.sink_unit));
  CHECK(cm.upgrading_per_gj >= 0);
  CHECK(cm.capture_per_t >= 0);
}

TEST_CASE("parameter invariants are enforced") {
  TechnoEconomicParams p;
  CHECK(validate_params(p).empty());
  p.discount_rate = 0.0;
  CHECK(!validate_params(p).empty());
  p = {};
  p.capture_efficiency = 1.2;
  CHECK(!validate_params(p).empty());
  p = {};
  p.upgrading_cost = -1;
  CHECK(!validate_params(p).empty());
}
