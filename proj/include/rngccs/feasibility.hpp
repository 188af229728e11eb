#pragma once

#include "rngccs/milp.hpp"

namespace rngccs {

// Independent solution verification, recomputed from the instance data (never
// from the model matrix): supply limits, intake capacity, the upgrading-split
// stoichiometry, CO2 routing/sink balances, activation coupling, and the 45Q
// eligibility logic. Empty result means the solution is physically coherent.
std::vector<std::string> check_solution(const NetworkInstance& instance,
                                        const NetworkSolution& solution,
                                        bool strict_mass_balance = false,
                                        double tol = 1e-6);

// Revenue/cost ledger recomputed directly from flows with the policy and
// cost formulas, bypassing the model's coefficient attribution.
struct RecomputedLedger {
  std::map<std::string, double> revenue;  // category -> $/yr
  std::map<std::string, double> cost;
  double total() const;
};

RecomputedLedger recompute_ledger(const NetworkInstance& instance,
                                  const NetworkSolution& solution);

}  // namespace rngccs
