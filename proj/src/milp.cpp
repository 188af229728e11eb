#include "rngccs/milp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rngccs/technoeconomics.hpp"
#include "rngccs/util.hpp"

namespace rngccs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pathway_kind_key(FacilityKind k) {
  return k == FacilityKind::LandfillGas ? "landfill_gas" : "wastewater";
}

double pathway_ci_or_throw(const PolicyScenario& pol, const std::string& key) {
  auto it = pol.pathway_ci.find(key);
  if (it == pol.pathway_ci.end())
    throw InputError("no carbon-intensity pathway for '" + key + "'");
  return it->second;
}

// The pooled-biogas upgrading split needs a single methane fraction.
double uniform_methane_fraction(const NetworkInstance& inst) {
  double mf = 0.60;
  bool have = false;
  for (const auto& t : inst.feedstock_types) {
    if (!have) {
      mf = t.methane_fraction;
      have = true;
    } else if (std::abs(t.methane_fraction - mf) > 1e-12) {
      throw InputError(
          "feedstock types declare differing methane fractions; the pooled "
          "upgrading split requires a single fraction (type '" + t.id + "')");
    }
  }
  return mf;
}

}  // namespace

int MilpModel::column(const std::string& key) const {
  auto it = var_index.find(key);
  return it == var_index.end() ? -1 : it->second;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapLimit: return "gap_limit";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::NoIncumbent: return "no_incumbent";
  }
  return "?";
}

const std::vector<LedgerCategory>& ledger_categories() {
  static const std::vector<LedgerCategory> cats = {
      {"digester", true, "biomass"},
      {"feedstock_transport", true, "biomass"},
      {"upgrading", true, "biomass"},
      {"capture_compression", true, "ccs"},
      {"co2_trucking", true, "ccs"},
      {"sequestration", true, "ccs"},
      {"lcfs", false, "revenue"},
      {"rin", false, "revenue"},
      {"q45", false, "revenue"},
      {"rng_sales", false, "revenue"},
  };
  return cats;
}

std::vector<double> big_m_bounds(const NetworkInstance& inst) {
  double mf = uniform_methane_fraction(inst);
  double capture_per_m3 =
      (1.0 - mf) * inst.params.co2_density * inst.params.capture_efficiency;

  std::vector<double> best_yield(inst.facilities.size(), 0.0);
  for (const auto& a : inst.dist_source_facility) {
    int fi = inst.feedstock_index(inst.sources[a.from].feedstock);
    best_yield[a.to] =
        std::max(best_yield[a.to], inst.feedstock_types[fi].biogas_yield);
  }

  std::vector<double> m(inst.facilities.size(), 0.0);
  for (size_t j = 0; j < inst.facilities.size(); ++j) {
    const auto& f = inst.facilities[j];
    double volume = f.capacity * best_yield[j] + f.fixed_biogas;
    m[j] = volume * capture_per_m3;
  }
  return m;
}

MilpModel build_model(const NetworkInstance& inst, const BuildOptions& options) {
  MilpModel model;
  model.maximize = true;
  model.strict_mass_balance = options.strict_mass_balance;

  const auto& pol = inst.policy;
  const auto& params = inst.params;
  CostModel cm = cost_coefficients(inst);
  double mf = uniform_methane_fraction(inst);
  double energy_per_m3 = mf * params.ch4_lhv;                 // GJ CH4 per m3 biogas
  double capture_per_m3 = (1.0 - mf) * params.co2_density * params.capture_efficiency;
  auto big_m = big_m_bounds(inst);
  model.q45_threshold = pol.q45_threshold;

  // Dollar-per-tonne-credit terms entering the LCFS revenue.
  double rin_per_gj = pol.rin_price / pol.gge_energy_gj;
  double capture_penalty_t_per_t = pol.grid_ci * pol.capture_electricity * 1e-6;
  double truck_penalty_t_per_t_mile = pol.truck_ef * 1e-6;
  auto fuel_credit_t_per_gj = [&](const std::string& key) {
    return (pol.benchmark_ci - pathway_ci_or_throw(pol, key)) * 1e-3;
  };

  for (const auto& s : inst.sources) model.source_ids.push_back(s.id);
  for (const auto& s : inst.sources) model.source_types.push_back(s.feedstock);
  for (const auto& f : inst.facilities) model.facility_ids.push_back(f.id);
  for (const auto& k : inst.sinks) model.sink_ids.push_back(k.id);
  model.sf_arcs = inst.dist_source_facility;
  model.fk_arcs = inst.dist_facility_sink;

  auto add_var = [&](const std::string& name, VarFamily fam, int entity,
                     bool binary, double upper, double tight_upper) {
    VarMeta v;
    v.name = name;
    v.family = fam;
    v.entity = entity;
    v.binary = binary;
    v.lower = 0.0;
    v.upper = binary ? 1.0 : upper;
    v.tight_upper = binary ? 1.0 : tight_upper;
    model.var_index[name] = static_cast<int>(model.vars.size());
    model.vars.push_back(std::move(v));
    return static_cast<int>(model.vars.size()) - 1;
  };
  auto add_revenue = [&](const std::string& cat, int col, double coeff) {
    if (coeff == 0.0) return;
    model.revenue_terms[cat].push_back({col, coeff});
    model.vars[col].objective += coeff;
  };
  auto add_cost = [&](const std::string& cat, int col, double coeff) {
    if (coeff == 0.0) return;
    model.cost_terms[cat].push_back({col, coeff});
    model.vars[col].objective -= coeff;
  };

  size_t nf = inst.facilities.size(), nk = inst.sinks.size();

  // Pre-compute the best reachable yield per facility for volume bounds.
  std::vector<double> best_yield(nf, 0.0);
  for (const auto& a : inst.dist_source_facility) {
    int fi = inst.feedstock_index(inst.sources[a.from].feedstock);
    best_yield[a.to] =
        std::max(best_yield[a.to], inst.feedstock_types[fi].biogas_yield);
  }

  // --- Variables, in family order.
  for (size_t j = 0; j < nf; ++j)
    model.y_col.push_back(add_var("facility_active[" + inst.facilities[j].id + "]",
                                  VarFamily::FacilityActive, j, true, 1.0, 1.0));
  for (size_t k = 0; k < nk; ++k)
    model.z_col.push_back(add_var("sink_active[" + inst.sinks[k].id + "]",
                                  VarFamily::SinkActive, k, true, 1.0, 1.0));
  for (size_t j = 0; j < nf; ++j)
    model.q_col.push_back(add_var("q45_eligible[" + inst.facilities[j].id + "]",
                                  VarFamily::Q45Eligible, j, true, 1.0, 1.0));
  for (size_t a = 0; a < inst.dist_source_facility.size(); ++a) {
    const auto& arc = inst.dist_source_facility[a];
    const auto& src = inst.sources[arc.from];
    const auto& fac = inst.facilities[arc.to];
    model.x_col.push_back(
        add_var("feedstock_flow[" + src.id + "," + fac.id + "," + src.feedstock + "]",
                VarFamily::FeedstockFlow, static_cast<int>(a), false, kInf,
                std::min(src.supply, fac.capacity)));
  }
  for (size_t j = 0; j < nf; ++j) {
    const auto& fac = inst.facilities[j];
    double volume_cap = fac.capacity * best_yield[j] + fac.fixed_biogas;
    model.b_col.push_back(add_var("biogas[" + fac.id + "]", VarFamily::Biogas, j,
                                  false, kInf, volume_cap));
  }
  for (size_t j = 0; j < nf; ++j)
    model.m_col.push_back(add_var("ch4[" + inst.facilities[j].id + "]",
                                  VarFamily::Ch4Energy, j, false, kInf,
                                  model.vars[model.b_col[j]].tight_upper * energy_per_m3));
  for (size_t j = 0; j < nf; ++j)
    model.c_col.push_back(add_var("co2_captured[" + inst.facilities[j].id + "]",
                                  VarFamily::Co2Captured, j, false, kInf, big_m[j]));
  for (size_t a = 0; a < inst.dist_facility_sink.size(); ++a) {
    const auto& arc = inst.dist_facility_sink[a];
    model.t_col.push_back(
        add_var("co2_shipped[" + inst.facilities[arc.from].id + "," +
                    inst.sinks[arc.to].id + "]",
                VarFamily::Co2Shipped, static_cast<int>(a), false, kInf,
                std::min(big_m[arc.from], inst.sinks[arc.to].capacity)));
  }
  for (size_t k = 0; k < nk; ++k)
    model.s_col.push_back(add_var("co2_sequestered[" + inst.sinks[k].id + "]",
                                  VarFamily::Co2Sequestered, k, false, kInf,
                                  inst.sinks[k].capacity));
  for (size_t j = 0; j < nf; ++j)
    model.r_col.push_back(add_var("q45_credited[" + inst.facilities[j].id + "]",
                                  VarFamily::Q45Credited, j, false, kInf, big_m[j]));

  // --- Objective and ledger attribution.
  for (size_t j = 0; j < nf; ++j) {
    const auto& fac = inst.facilities[j];
    add_cost("digester", model.y_col[j], cm.facility_fixed[j]);
    if (fac.fixed_biogas > 0) {
      double gj = fac.fixed_biogas * energy_per_m3;
      add_revenue("lcfs", model.y_col[j],
                  pol.lcfs_price * fuel_credit_t_per_gj(pathway_kind_key(fac.kind)) * gj);
    }
  }
  for (size_t a = 0; a < inst.dist_source_facility.size(); ++a) {
    const auto& arc = inst.dist_source_facility[a];
    const auto& src = inst.sources[arc.from];
    int fi = inst.feedstock_index(src.feedstock);
    double yield = inst.feedstock_types[fi].biogas_yield;
    int col = model.x_col[a];
    add_cost("feedstock_transport", col, cm.feedstock_arc_cost[a]);
    add_cost("digester", col, cm.facility_processing[arc.to]);
    add_revenue("lcfs", col,
                pol.lcfs_price * fuel_credit_t_per_gj(src.feedstock) * yield *
                    energy_per_m3);
  }
  for (size_t j = 0; j < nf; ++j) {
    int col = model.m_col[j];
    add_revenue("rng_sales", col, pol.rng_price);
    add_revenue("rin", col, rin_per_gj);
    add_cost("upgrading", col, cm.upgrading_per_gj);
  }
  for (size_t j = 0; j < nf; ++j) {
    int col = model.c_col[j];
    add_cost("capture_compression", col, cm.capture_per_t);
    add_revenue("lcfs", col, -pol.lcfs_price * capture_penalty_t_per_t);
  }
  for (size_t a = 0; a < inst.dist_facility_sink.size(); ++a) {
    int col = model.t_col[a];
    add_cost("co2_trucking", col, cm.co2_arc_cost[a]);
    add_revenue("lcfs", col,
                pol.lcfs_price *
                    (1.0 - truck_penalty_t_per_t_mile * inst.dist_facility_sink[a].miles));
  }
  for (size_t k = 0; k < nk; ++k) {
    add_cost("sequestration", model.z_col[k], cm.sink_fixed[k]);
    add_cost("sequestration", model.s_col[k], cm.sink_unit[k]);
  }
  for (size_t j = 0; j < nf; ++j)
    add_revenue("q45", model.r_col[j], pol.q45_price);

  // --- Constraints.
  auto add_row = [&](const std::string& name, Relation rel, double rhs,
                     std::vector<std::pair<int, double>> coeffs) {
    ConstraintRow row;
    row.name = name;
    row.rel = rel;
    row.rhs = rhs;
    std::sort(coeffs.begin(), coeffs.end());
    row.coeffs = std::move(coeffs);
    model.rows.push_back(std::move(row));
  };

  std::vector<std::vector<int>> arcs_into_facility(nf), arcs_from_source(
      inst.sources.size());
  for (size_t a = 0; a < inst.dist_source_facility.size(); ++a) {
    arcs_into_facility[inst.dist_source_facility[a].to].push_back(a);
    arcs_from_source[inst.dist_source_facility[a].from].push_back(a);
  }
  std::vector<std::vector<int>> arcs_from_facility(nf), arcs_into_sink(nk);
  for (size_t a = 0; a < inst.dist_facility_sink.size(); ++a) {
    arcs_from_facility[inst.dist_facility_sink[a].from].push_back(a);
    arcs_into_sink[inst.dist_facility_sink[a].to].push_back(a);
  }

  for (size_t i = 0; i < inst.sources.size(); ++i) {
    if (arcs_from_source[i].empty()) continue;
    std::vector<std::pair<int, double>> coeffs;
    for (int a : arcs_from_source[i]) coeffs.push_back({model.x_col[a], 1.0});
    add_row("supply[" + inst.sources[i].id + "]", Relation::Le,
            inst.sources[i].supply, std::move(coeffs));
  }

  for (size_t j = 0; j < nf; ++j) {
    if (arcs_into_facility[j].empty()) continue;
    std::vector<std::pair<int, double>> coeffs;
    for (int a : arcs_into_facility[j]) coeffs.push_back({model.x_col[a], 1.0});
    coeffs.push_back({model.y_col[j], -inst.facilities[j].capacity});
    add_row("capacity[" + inst.facilities[j].id + "]", Relation::Le, 0.0,
            std::move(coeffs));
  }

  for (size_t j = 0; j < nf; ++j) {
    std::vector<std::pair<int, double>> coeffs;
    coeffs.push_back({model.b_col[j], 1.0});
    for (int a : arcs_into_facility[j]) {
      const auto& arc = inst.dist_source_facility[a];
      int fi = inst.feedstock_index(inst.sources[arc.from].feedstock);
      coeffs.push_back({model.x_col[a], -inst.feedstock_types[fi].biogas_yield});
    }
    if (inst.facilities[j].fixed_biogas > 0)
      coeffs.push_back({model.y_col[j], -inst.facilities[j].fixed_biogas});
    add_row("biogas_def[" + inst.facilities[j].id + "]", Relation::Eq, 0.0,
            std::move(coeffs));
  }

  for (size_t j = 0; j < nf; ++j) {
    add_row("ch4_split[" + inst.facilities[j].id + "]", Relation::Eq, 0.0,
            {{model.m_col[j], 1.0}, {model.b_col[j], -energy_per_m3}});
    add_row("co2_split[" + inst.facilities[j].id + "]", Relation::Eq, 0.0,
            {{model.c_col[j], 1.0}, {model.b_col[j], -capture_per_m3}});
  }

  for (size_t j = 0; j < nf; ++j) {
    std::vector<std::pair<int, double>> coeffs;
    for (int a : arcs_from_facility[j]) coeffs.push_back({model.t_col[a], 1.0});
    coeffs.push_back({model.c_col[j], -1.0});
    add_row("co2_routing[" + inst.facilities[j].id + "]",
            options.strict_mass_balance ? Relation::Eq : Relation::Le, 0.0,
            std::move(coeffs));
  }

  for (size_t k = 0; k < nk; ++k) {
    std::vector<std::pair<int, double>> coeffs;
    coeffs.push_back({model.s_col[k], 1.0});
    for (int a : arcs_into_sink[k]) coeffs.push_back({model.t_col[a], -1.0});
    add_row("sink_balance[" + inst.sinks[k].id + "]", Relation::Eq, 0.0,
            std::move(coeffs));
    add_row("sink_capacity[" + inst.sinks[k].id + "]", Relation::Le, 0.0,
            {{model.s_col[k], 1.0}, {model.z_col[k], -inst.sinks[k].capacity}});
  }

  for (size_t j = 0; j < nf; ++j) {
    const std::string& id = inst.facilities[j].id;
    if (pol.q45_threshold > 0) {
      add_row("q45_threshold[" + id + "]", Relation::Le, 0.0,
              {{model.q_col[j], pol.q45_threshold}, {model.c_col[j], -1.0}});
      add_row("q45_gate[" + id + "]", Relation::Le, 0.0,
              {{model.r_col[j], 1.0}, {model.q_col[j], -big_m[j]}});
    }
    std::vector<std::pair<int, double>> coeffs;
    coeffs.push_back({model.r_col[j], 1.0});
    for (int a : arcs_from_facility[j]) coeffs.push_back({model.t_col[a], -1.0});
    add_row("q45_credit_cap[" + id + "]", Relation::Le, 0.0, std::move(coeffs));
  }

  return model;
}

NetworkSolution extract_solution(const MilpModel& model, const RawSolution& raw) {
  if (raw.values.size() != model.vars.size())
    throw std::runtime_error("raw assignment has " +
                             std::to_string(raw.values.size()) + " values for " +
                             std::to_string(model.vars.size()) + " columns");

  // Independent row check against the model rows.
  double worst = 0.0;
  std::string worst_row;
  for (const auto& row : model.rows) {
    double activity = 0.0;
    double scale = std::max(1.0, std::abs(row.rhs));
    for (const auto& [col, coef] : row.coeffs) {
      activity += coef * raw.values[col];
      scale = std::max(scale, std::abs(coef * raw.values[col]));
    }
    double viol = 0.0;
    if (row.rel == Relation::Le) viol = activity - row.rhs;
    else if (row.rel == Relation::Ge) viol = row.rhs - activity;
    else viol = std::abs(activity - row.rhs);
    viol /= scale;
    if (viol > worst) {
      worst = viol;
      worst_row = row.name;
    }
  }
  if (worst > 1e-6)
    throw std::runtime_error("assignment violates constraint '" + worst_row +
                             "' by " + format_number(worst) + " (relative)");

  NetworkSolution sol;
  auto value = [&](int col) {
    double v = raw.values[col];
    double scale = std::max(1.0, std::isfinite(model.vars[col].tight_upper)
                                     ? model.vars[col].tight_upper
                                     : 1.0);
    return std::abs(v) < 1e-7 * scale ? 0.0 : v;
  };

  for (size_t j = 0; j < model.facility_ids.size(); ++j) {
    const auto& id = model.facility_ids[j];
    sol.facility_active[id] = raw.values[model.y_col[j]] > 0.5;
    sol.q45_eligible[id] = raw.values[model.q_col[j]] > 0.5;
    sol.biogas[id] = value(model.b_col[j]);
    sol.ch4[id] = value(model.m_col[j]);
    sol.co2_captured[id] = value(model.c_col[j]);
    sol.q45_credited[id] = value(model.r_col[j]);
  }
  for (size_t k = 0; k < model.sink_ids.size(); ++k) {
    const auto& id = model.sink_ids[k];
    sol.sink_active[id] = raw.values[model.z_col[k]] > 0.5;
    sol.co2_sequestered[id] = value(model.s_col[k]);
  }
  for (size_t a = 0; a < model.sf_arcs.size(); ++a) {
    const auto& arc = model.sf_arcs[a];
    double v = value(model.x_col[a]);
    if (v > 0)
      sol.feedstock_flow[{model.source_ids[arc.from], model.facility_ids[arc.to],
                          model.source_types[arc.from]}] = v;
  }
  for (size_t a = 0; a < model.fk_arcs.size(); ++a) {
    const auto& arc = model.fk_arcs[a];
    double v = value(model.t_col[a]);
    if (v > 0)
      sol.co2_shipped[{model.facility_ids[arc.from], model.sink_ids[arc.to]}] = v;
  }

  // Ledger recomputed from flows via the category attribution.
  double total = 0.0;
  for (const auto& cat : ledger_categories()) {
    const auto& terms = cat.is_cost ? model.cost_terms : model.revenue_terms;
    double sum = 0.0;
    auto it = terms.find(cat.name);
    if (it != terms.end())
      for (const auto& [col, coef] : it->second) sum += coef * raw.values[col];
    if (cat.is_cost) {
      sol.cost_breakdown[cat.name] = sum;
      total -= sum;
    } else {
      sol.revenue_breakdown[cat.name] = sum;
      total += sum;
    }
  }
  double rel = std::abs(total - raw.objective) /
               std::max({1.0, std::abs(total), std::abs(raw.objective)});
  if (rel > 1e-6)
    throw std::runtime_error("ledger total " + format_number(total) +
                             " does not match solver objective " +
                             format_number(raw.objective));

  sol.objective = raw.objective;
  sol.bound = raw.bound;
  sol.gap = raw.gap;
  sol.nodes = raw.nodes;
  sol.lp_iterations = raw.lp_iterations;
  sol.seconds = raw.seconds;
  sol.status = raw.status;
  return sol;
}

double NetworkSolution::total_ch4_gj() const {
  double sum = 0.0;
  for (const auto& [id, v] : ch4) sum += v;
  return sum;
}

double NetworkSolution::total_sequestered_t() const {
  double sum = 0.0;
  for (const auto& [id, v] : co2_sequestered) sum += v;
  return sum;
}

int NetworkSolution::active_facility_count() const {
  int n = 0;
  for (const auto& [id, a] : facility_active) n += a ? 1 : 0;
  return n;
}

int NetworkSolution::active_sink_count() const {
  int n = 0;
  for (const auto& [id, a] : sink_active) n += a ? 1 : 0;
  return n;
}

namespace {

std::string lp_name(const std::string& semantic) {
  std::string out;
  out.reserve(semantic.size());
  for (char c : semantic) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out.push_back(c);
    else if (c == '[' || c == ',' ) out.push_back('_');
    // ']' dropped
  }
  return out;
}

std::string lp_coef(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", std::abs(v));
  return buf;
}

std::string lp_signed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& terms,
                 const std::vector<VarMeta>& vars) {
  int written = 0;
  for (const auto& [col, coef] : terms) {
    if (coef == 0.0) continue;
    out << ' ' << (coef < 0 ? '-' : '+') << ' ' << lp_coef(coef) << ' '
        << lp_name(vars[col].name);
    if (++written % 4 == 0) out << "\n   ";
  }
  if (written == 0) out << " 0 " << (vars.empty() ? "x0" : lp_name(vars[0].name));
}

}  // namespace

void write_lp_format(const MilpModel& model, std::ostream& out) {
  out << (model.maximize ? "Maximize" : "Minimize") << "\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (size_t j = 0; j < model.vars.size(); ++j)
    if (model.vars[j].objective != 0.0)
      obj.push_back({static_cast<int>(j), model.vars[j].objective});
  write_terms(out, obj, model.vars);
  out << "\nSubject To\n";
  for (const auto& row : model.rows) {
    out << ' ' << lp_name(row.name) << ':';
    write_terms(out, row.coeffs, model.vars);
    switch (row.rel) {
      case Relation::Le: out << " <= "; break;
      case Relation::Eq: out << " = "; break;
      case Relation::Ge: out << " >= "; break;
    }
    out << lp_signed(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : model.vars) {
    if (v.binary) continue;
    if (std::isfinite(v.upper))
      out << ' ' << lp_signed(v.lower) << " <= " << lp_name(v.name) << " <= "
          << lp_signed(v.upper) << "\n";
    else
      out << ' ' << lp_name(v.name) << " >= " << lp_signed(v.lower) << "\n";
  }
  bool any_binary = false;
  for (const auto& v : model.vars) any_binary = any_binary || v.binary;
  if (any_binary) {
    out << "Binaries\n";
    int written = 0;
    for (const auto& v : model.vars) {
      if (!v.binary) continue;
      out << ' ' << lp_name(v.name);
      if (++written % 6 == 0) out << "\n";
    }
    if (written % 6 != 0) out << "\n";
  }
  out << "End\n";
}

}  // namespace rngccs
