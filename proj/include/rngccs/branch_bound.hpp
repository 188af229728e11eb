#pragma once

#include <functional>
#include <optional>

#include "rngccs/milp.hpp"

namespace rngccs {

enum class BranchingRule { MostFractional, PseudoCost };
enum class NodeSelection { BestBound, DepthFirstDive };

struct SolverConfig {
  double gap_tolerance = 0.10;
  double time_limit_seconds = 600.0;
  long node_limit = 1000000;
  BranchingRule branching = BranchingRule::MostFractional;
  NodeSelection node_selection = NodeSelection::BestBound;
  double lp_feas_tol = 1e-7;
  double int_tol = 1e-6;
  uint64_t seed = 0;  // tie-breaking only
  // One line per incumbent improvement: nodes=.. incumbent=.. bound=.. gap=..
  std::function<void(const std::string&)> progress;
};

// Relative optimality gap, (bound - incumbent) / max(|bound|, 1e-9).
double relative_gap(double incumbent, double bound);

// LP-relaxation branch-and-bound over the model's binaries. The optional
// warm start must be a feasible assignment; its objective seeds the
// incumbent. Presolve fixes 45Q eligibility when the threshold is zero and
// applies the model's tightened upper bounds.
RawSolution solve_mip(const MilpModel& model, const SolverConfig& config,
                      const std::vector<double>* warm_start = nullptr);

// Convenience: solve and extract in one step.
NetworkSolution branch_and_bound(const MilpModel& model, const SolverConfig& config,
                                 const std::vector<double>* warm_start = nullptr);

// Feasible starting solution: facilities ranked by standalone profit with
// greedy feedstock/sink allocation; all-zero when nothing is profitable.
// Returned as a raw assignment aligned with build_model(instance, options).
std::vector<double> greedy_incumbent(const NetworkInstance& instance,
                                     const MilpModel& model);

// Objective of an assignment under the model (no feasibility check).
double assignment_objective(const MilpModel& model, const std::vector<double>& x);

// Max row violation of an assignment, relative to row magnitude.
double assignment_violation(const MilpModel& model, const std::vector<double>& x);

}  // namespace rngccs
