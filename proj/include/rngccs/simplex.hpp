#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rngccs {

enum class Relation : char { Le = 'L', Eq = 'E', Ge = 'G' };

// General-form LP: optimize c'x subject to row relations and column bounds.
// Infinite bounds are +/-infinity doubles.
struct LinearProgram {
  bool maximize = true;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (column, value), sorted
    Relation rel = Relation::Le;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, Stalled };

// Basis snapshot over structural columns + one slack per row; reusable as a
// warm start across related solves.
struct Basis {
  enum Stat : uint8_t { Basic = 0, AtLower = 1, AtUpper = 2, FreeZero = 3 };
  std::vector<uint8_t> stat;
  bool empty() const { return stat.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::Stalled;
  std::vector<double> x;          // structural columns only
  std::vector<double> row_duals;  // y, one per row (maximization convention)
  double objective = 0.0;
  double dual_objective = 0.0;    // y'b + sum of reduced costs at bounds
  int iterations = 0;
  Basis basis;
  std::string message;            // diagnostics for Stalled
};

struct SimplexOptions {
  double feas_tol = 1e-7;   // row feasibility, relative to row magnitude
  double opt_tol = 1e-9;    // reduced-cost tolerance, relative to objective scale
  int max_iterations = 50000;
  int refactor_every = 96;
};

// Bounded-variable revised simplex with a dense inverse, product-form
// updates, and periodic refactorization. Phase 1 drives bound violations to
// zero from any starting basis, so a stale warm-start basis is fine.
LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {},
                  const Basis* warm_start = nullptr);

}  // namespace rngccs
