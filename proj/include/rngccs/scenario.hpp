#pragma once

#include <filesystem>
#include <limits>

#include "rngccs/branch_bound.hpp"
#include "rngccs/feasibility.hpp"

namespace rngccs {

// Headline metrics for one solved policy run.
struct RunMetrics {
  std::string scenario;
  double param_value = std::numeric_limits<double>::quiet_NaN();  // sweeps only
  double rng_pj = 0.0;          // PJ CH4 per year
  double co2_mt = 0.0;          // tCO2 sequestered per year
  int n_facilities = 0;
  int n_sinks = 0;
  double profit_per_gj = std::numeric_limits<double>::quiet_NaN();  // NaN = undefined
  std::map<std::string, double> revenue_per_gj;  // category -> $/GJ
  std::map<std::string, double> cost_per_gj;
  double gap = 0.0;
  double wall_seconds = 0.0;

  // Policy columns echoed for the scenario table.
  double lcfs_price = 0.0, rin_price = 0.0, q45_price = 0.0, q45_threshold = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  NetworkSolution solution;
};

struct RunOptions {
  BuildOptions build;
};

// Solves one scenario on the instance: build, greedy warm start, branch and
// bound, extraction, independent feasibility check, metrics.
RunResult run_scenario(const NetworkInstance& instance,
                       const PolicyScenario& scenario, const SolverConfig& config,
                       const RunOptions& options = {});

enum class SweepParameter {
  BiogasYieldScale,
  LcfsPrice,
  RinPrice,
  RngPrice,
  Q45Price,
  TransportCostScale,
};

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::LcfsPrice;
  std::vector<double> values;  // nonempty, strictly increasing
  PolicyScenario base_scenario;
};

// One solve per value, all else held at the base scenario. Price moves reuse
// the previous solution as a warm start; scale moves repair it first and use
// it only if it stays feasible.
std::vector<RunResult> run_sweep(const NetworkInstance& instance,
                                 const SweepSpec& sweep, const SolverConfig& config,
                                 const RunOptions& options = {});

// scenarios.csv emission (one row per run). wall_s is measurement, not model
// output; reruns are byte-identical except for that column.
void write_metrics_csv(const std::filesystem::path& file,
                       const std::vector<RunMetrics>& rows);

}  // namespace rngccs
