#pragma once

// Test-only LP oracle: a classic dense two-phase full-tableau simplex with
// Bland's rule. Deliberately independent of the production solver: upper
// bounds become explicit rows, artificials handle >= and = rows, and the
// whole tableau is carried densely.

#include "rngccs/simplex.hpp"

namespace rngccs::testing {

struct OracleResult {
  LpStatus status = LpStatus::Stalled;
  double objective = 0.0;
  std::vector<double> x;
};

// Requires finite lower bounds on every column.
OracleResult oracle_solve_lp(const LinearProgram& lp);

}  // namespace rngccs::testing
