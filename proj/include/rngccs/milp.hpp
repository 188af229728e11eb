#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "rngccs/domain.hpp"
#include "rngccs/simplex.hpp"

namespace rngccs {

// Variable families of the network design MILP.
enum class VarFamily {
  FacilityActive,   // y, binary per facility
  SinkActive,       // z, binary per sink
  Q45Eligible,      // q, binary per facility
  FeedstockFlow,    // x, wt/yr per source->facility arc
  Biogas,           // b, m3/yr per facility
  Ch4Energy,        // m, GJ/yr per facility
  Co2Captured,      // c, tCO2/yr per facility
  Co2Shipped,       // t, tCO2/yr per facility->sink arc
  Co2Sequestered,   // s, tCO2/yr per sink
  Q45Credited,      // r, tCO2/yr per facility
};

struct VarMeta {
  std::string name;   // semantic key, e.g. x[S1,F2,food_waste]
  VarFamily family{};
  int entity = -1;    // facility/sink/arc index depending on family
  bool binary = false;
  double lower = 0.0;
  double upper = 0.0;        // +inf allowed
  double objective = 0.0;    // $/yr per unit, maximization sense
  double tight_upper = 0.0;  // presolve hint, provably >= any feasible value
};

struct ConstraintRow {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;
  Relation rel = Relation::Le;
  double rhs = 0.0;
};

struct MilpModel {
  std::vector<VarMeta> vars;
  std::vector<ConstraintRow> rows;
  bool maximize = true;
  std::map<std::string, int> var_index;  // semantic key -> column

  // Revenue/cost attribution: category -> per-column dollar coefficients.
  // Summing coeff * value over a category reproduces the ledger from flows.
  using CategoryTerms = std::map<std::string, std::vector<std::pair<int, double>>>;
  CategoryTerms revenue_terms;
  CategoryTerms cost_terms;

  double q45_threshold = 0.0;
  bool strict_mass_balance = false;

  // Entity bookkeeping for solution extraction.
  std::vector<std::string> source_ids, facility_ids, sink_ids, source_types;
  std::vector<DistArc> sf_arcs, fk_arcs;
  std::vector<int> y_col, z_col, q_col, b_col, m_col, c_col, r_col, s_col;
  std::vector<int> x_col;  // per sf arc
  std::vector<int> t_col;  // per fk arc

  int column(const std::string& key) const;  // -1 when absent
};

struct BuildOptions {
  // When set, captured CO2 must all ship to a sink (no venting).
  bool strict_mass_balance = false;
};

// Upper bound on each facility's annual CO2 capture: intake capacity at the
// best-yield feedstock reachable over present arcs, plus the fixed gas
// endowment, pushed through the upgrading split.
std::vector<double> big_m_bounds(const NetworkInstance& instance);

MilpModel build_model(const NetworkInstance& instance,
                      const BuildOptions& options = {});

enum class SolveStatus { Optimal, GapLimit, NodeLimit, TimeLimit, NoIncumbent };

std::string to_string(SolveStatus s);

// Raw solver output: one value per model column plus the certificate.
struct RawSolution {
  std::vector<double> values;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

struct NetworkSolution {
  std::map<std::string, bool> facility_active;
  std::map<std::string, bool> sink_active;
  std::map<std::string, bool> q45_eligible;
  // (source, facility, feedstock type) -> wt/yr
  std::map<std::tuple<std::string, std::string, std::string>, double> feedstock_flow;
  std::map<std::string, double> biogas;          // m3/yr
  std::map<std::string, double> ch4;             // GJ/yr
  std::map<std::string, double> co2_captured;    // tCO2/yr
  std::map<std::pair<std::string, std::string>, double> co2_shipped;
  std::map<std::string, double> co2_sequestered;
  std::map<std::string, double> q45_credited;    // tCO2/yr earning 45Q

  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  std::map<std::string, double> revenue_breakdown;  // category -> $/yr
  std::map<std::string, double> cost_breakdown;

  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
  SolveStatus status = SolveStatus::Optimal;

  double total_ch4_gj() const;
  double total_sequestered_t() const;
  int active_facility_count() const;
  int active_sink_count() const;
};

// Converts a raw assignment into semantic maps. Verifies the assignment
// satisfies every row within feasibility tolerance (throws naming the worst
// row otherwise) and that the category ledger matches the solver objective
// to 1e-6 relative.
NetworkSolution extract_solution(const MilpModel& model, const RawSolution& raw);

// Plain-text LP-format export (objective, rows, bounds, binaries).
void write_lp_format(const MilpModel& model, std::ostream& out);

// Ledger categories in presentation order, with their display group.
struct LedgerCategory {
  std::string name;
  bool is_cost;
  std::string group;  // "biomass" | "ccs" | "revenue"
};
const std::vector<LedgerCategory>& ledger_categories();

}  // namespace rngccs
