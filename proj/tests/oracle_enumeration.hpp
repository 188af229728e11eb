#pragma once

// Test-only MIP oracle: exhaustive enumeration over every binary pattern
// (facility activation, sink activation, 45Q eligibility), solving the
// residual LP for each. Eligibility patterns outside the active facility set
// are skipped when a positive threshold makes them infeasible by
// construction (the threshold row forces capture >= threshold > 0 while an
// inactive facility captures nothing).

#include <cmath>

#include "rngccs/milp.hpp"
#include "rngccs/simplex.hpp"

namespace rngccs::testing {

struct EnumerationResult {
  double objective = 0.0;
  long patterns = 0;
  long feasible = 0;
};

inline EnumerationResult enumerate_optimum(const rngccs::MilpModel& model) {
  using namespace rngccs;
  EnumerationResult out;
  out.objective = -std::numeric_limits<double>::infinity();

  LinearProgram base;
  base.maximize = model.maximize;
  for (const auto& v : model.vars) {
    base.objective.push_back(v.objective);
    base.lower.push_back(v.lower);
    base.upper.push_back(std::min(v.upper, v.tight_upper));
  }
  for (const auto& r : model.rows) {
    LinearProgram::Row row;
    row.coeffs = r.coeffs;
    row.rel = r.rel;
    row.rhs = r.rhs;
    base.rows.push_back(std::move(row));
  }

  int nf = static_cast<int>(model.facility_ids.size());
  int nk = static_cast<int>(model.sink_ids.size());
  if (nf == 0 && nk == 0) {
    out.objective = 0.0;
    out.patterns = 1;
    out.feasible = 1;
    return out;
  }

  bool gated = model.q45_threshold > 0.0;
  for (int ymask = 0; ymask < (1 << nf); ++ymask) {
    for (int zmask = 0; zmask < (1 << nk); ++zmask) {
      int qsub = ymask;
      for (;;) {
        int qmask = gated ? qsub : (1 << nf) - 1;
        LinearProgram lp = base;
        for (int j = 0; j < nf; ++j) {
          double y = (ymask >> j) & 1 ? 1.0 : 0.0;
          lp.lower[model.y_col[j]] = y;
          lp.upper[model.y_col[j]] = y;
          double q = (qmask >> j) & 1 ? 1.0 : 0.0;
          lp.lower[model.q_col[j]] = q;
          lp.upper[model.q_col[j]] = q;
        }
        for (int k = 0; k < nk; ++k) {
          double z = (zmask >> k) & 1 ? 1.0 : 0.0;
          lp.lower[model.z_col[k]] = z;
          lp.upper[model.z_col[k]] = z;
        }
        ++out.patterns;
        auto res = solve_lp(lp);
        if (res.status == LpStatus::Optimal) {
          ++out.feasible;
          out.objective = std::max(out.objective, res.objective);
        }
        if (!gated) break;
        if (qsub == 0) break;
        qsub = (qsub - 1) & ymask;
      }
    }
  }
  return out;
}

}  // namespace rngccs::testing
