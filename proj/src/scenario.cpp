#include "rngccs/scenario.hpp"

#include <cmath>
#include <iostream>

#include "rngccs/util.hpp"

namespace rngccs {

namespace {

RunMetrics metrics_from(const NetworkSolution& sol, const std::string& name,
                        const PolicyScenario& pol) {
  RunMetrics m;
  m.scenario = name;
  double total_gj = sol.total_ch4_gj();
  m.rng_pj = total_gj / 1e6;
  m.co2_mt = sol.total_sequestered_t();
  m.n_facilities = sol.active_facility_count();
  m.n_sinks = sol.active_sink_count();
  if (total_gj > 0) {
    m.profit_per_gj = sol.objective / total_gj;
    for (const auto& [cat, v] : sol.revenue_breakdown)
      m.revenue_per_gj[cat] = v / total_gj;
    for (const auto& [cat, v] : sol.cost_breakdown)
      m.cost_per_gj[cat] = v / total_gj;
  }
  m.gap = sol.gap;
  m.wall_seconds = sol.seconds;
  m.lcfs_price = pol.lcfs_price;
  m.rin_price = pol.rin_price;
  m.q45_price = pol.q45_price;
  m.q45_threshold = pol.q45_threshold;
  return m;
}

}  // namespace

RunResult run_scenario(const NetworkInstance& instance,
                       const PolicyScenario& scenario, const SolverConfig& config,
                       const RunOptions& options) {
  NetworkInstance inst = instance;
  inst.policy = scenario;
  auto violations = validate(inst);
  if (!violations.empty())
    throw InputError("instance invalid for scenario '" + scenario.name +
                     "': " + violations.front().text());

  MilpModel model = build_model(inst, options.build);
  std::vector<double> warm = greedy_incumbent(inst, model);
  RawSolution raw = solve_mip(model, config, &warm);
  NetworkSolution sol = extract_solution(model, raw);

  auto physical =
      check_solution(inst, sol, options.build.strict_mass_balance);
  if (!physical.empty())
    throw std::runtime_error("solution failed the physical check: " +
                             physical.front());

  RunResult out;
  out.solution = std::move(sol);
  out.metrics = metrics_from(out.solution, scenario.name, scenario);
  return out;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::BiogasYieldScale: return "biogas_yield_scale";
    case SweepParameter::LcfsPrice: return "lcfs_price";
    case SweepParameter::RinPrice: return "rin_price";
    case SweepParameter::RngPrice: return "rng_price";
    case SweepParameter::Q45Price: return "q45_price";
    case SweepParameter::TransportCostScale: return "transport_cost_scale";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  for (auto p : {SweepParameter::BiogasYieldScale, SweepParameter::LcfsPrice,
                 SweepParameter::RinPrice, SweepParameter::RngPrice,
                 SweepParameter::Q45Price, SweepParameter::TransportCostScale})
    if (to_string(p) == s) return p;
  throw InputError(
      "unknown sweep parameter '" + s +
      "'; valid: biogas_yield_scale, lcfs_price, rin_price, rng_price, "
      "q45_price, transport_cost_scale");
}

namespace {

bool is_price_parameter(SweepParameter p) {
  return p == SweepParameter::LcfsPrice || p == SweepParameter::RinPrice ||
         p == SweepParameter::RngPrice || p == SweepParameter::Q45Price;
}

// Applies one sweep setting; scale parameters transform the instance.
NetworkInstance apply_sweep_value(const NetworkInstance& base,
                                  const SweepSpec& sweep, double value) {
  NetworkInstance inst = base;
  inst.policy = sweep.base_scenario;
  switch (sweep.parameter) {
    case SweepParameter::LcfsPrice: inst.policy.lcfs_price = value; break;
    case SweepParameter::RinPrice: inst.policy.rin_price = value; break;
    case SweepParameter::RngPrice: inst.policy.rng_price = value; break;
    case SweepParameter::Q45Price: inst.policy.q45_price = value; break;
    case SweepParameter::BiogasYieldScale:
      for (auto& t : inst.feedstock_types) t.biogas_yield *= value;
      break;
    case SweepParameter::TransportCostScale:
      inst.params.feedstock_transport_fixed *= value;
      inst.params.feedstock_transport_per_mile *= value;
      inst.params.co2_truck_fixed *= value;
      inst.params.co2_truck_per_mile *= value;
      break;
  }
  return inst;
}

// Rebuilds the dependent variables of a previous assignment for a new model:
// biogas/CH4/CO2 follow the flows; shipments shrink to the new capture;
// eligibility re-checks the threshold.
std::vector<double> repair_assignment(const MilpModel& model,
                                      const std::vector<double>& prev) {
  if (prev.size() != model.vars.size()) return {};
  std::vector<double> x = prev;

  size_t nf = model.facility_ids.size();
  std::vector<double> feed_gas(nf, 0.0);
  // Recover stoichiometry from the model's own equality rows so the repair
  // stays consistent with whatever coefficients the model carries.
  for (size_t j = 0; j < nf; ++j) {
    double b = 0.0;
    for (const auto& row : model.rows) {
      if (row.name != "biogas_def[" + model.facility_ids[j] + "]") continue;
      for (const auto& [col, coef] : row.coeffs)
        if (col != model.b_col[j]) b -= coef * x[col];
      break;
    }
    feed_gas[j] = b;
    x[model.b_col[j]] = b;
    // ch4_split / co2_split rows: var + k * b = 0.
    auto split_value = [&](const std::string& prefix, int var_col) {
      for (const auto& row : model.rows) {
        if (row.name != prefix + "[" + model.facility_ids[j] + "]") continue;
        for (const auto& [col, coef] : row.coeffs)
          if (col != var_col) return -coef * b;
      }
      return 0.0;
    };
    x[model.m_col[j]] = split_value("ch4_split", model.m_col[j]);
    x[model.c_col[j]] = split_value("co2_split", model.c_col[j]);
  }

  // Scale shipments down when capture shrank.
  std::vector<double> shipped(nf, 0.0);
  for (size_t a = 0; a < model.fk_arcs.size(); ++a)
    shipped[model.fk_arcs[a].from] += x[model.t_col[a]];
  for (size_t a = 0; a < model.fk_arcs.size(); ++a) {
    int j = model.fk_arcs[a].from;
    double c = x[model.c_col[j]];
    if (shipped[j] > c && shipped[j] > 0)
      x[model.t_col[a]] *= c / shipped[j];
  }
  std::vector<double> sink_in(model.sink_ids.size(), 0.0);
  for (size_t a = 0; a < model.fk_arcs.size(); ++a)
    sink_in[model.fk_arcs[a].to] += x[model.t_col[a]];
  for (size_t k = 0; k < model.sink_ids.size(); ++k)
    x[model.s_col[k]] = sink_in[k];

  std::vector<double> ship_total(nf, 0.0);
  for (size_t a = 0; a < model.fk_arcs.size(); ++a)
    ship_total[model.fk_arcs[a].from] += x[model.t_col[a]];
  for (size_t j = 0; j < nf; ++j) {
    bool eligible = model.q45_threshold == 0.0
                        ? true
                        : x[model.c_col[j]] >= model.q45_threshold &&
                              x[model.y_col[j]] > 0.5;
    x[model.q_col[j]] = eligible ? 1.0 : 0.0;
    x[model.r_col[j]] = eligible ? std::min(x[model.r_col[j]], ship_total[j])
                                 : 0.0;
    if (eligible && x[model.r_col[j]] == 0.0) x[model.r_col[j]] = ship_total[j];
  }
  return x;
}

}  // namespace

std::vector<RunResult> run_sweep(const NetworkInstance& instance,
                                 const SweepSpec& sweep, const SolverConfig& config,
                                 const RunOptions& options) {
  if (sweep.values.empty()) throw InputError("sweep values must be nonempty");
  for (size_t i = 1; i < sweep.values.size(); ++i)
    if (!(sweep.values[i] > sweep.values[i - 1] ||
          sweep.values[i] == sweep.values[i - 1]))
      throw InputError("sweep values must be ordered");

  std::vector<RunResult> out;
  std::vector<double> prev_assignment;
  for (double value : sweep.values) {
    NetworkInstance inst = apply_sweep_value(instance, sweep, value);
    auto violations = validate(inst);
    if (!violations.empty())
      throw InputError("sweep value " + format_number(value) +
                       " makes the instance invalid: " +
                       violations.front().text());

    MilpModel model = build_model(inst, options.build);
    std::vector<double> warm = greedy_incumbent(inst, model);
    // Previous solution as an extra warm start. Prices leave feasibility
    // untouched; scales need the repair + recheck.
    if (!prev_assignment.empty()) {
      std::vector<double> carried = is_price_parameter(sweep.parameter)
                                        ? prev_assignment
                                        : repair_assignment(model, prev_assignment);
      if (!carried.empty() && assignment_violation(model, carried) <= 1e-7 &&
          assignment_objective(model, carried) >
              assignment_objective(model, warm))
        warm = carried;
    }

    RawSolution raw = solve_mip(model, config, &warm);
    NetworkSolution sol = extract_solution(model, raw);
    auto physical = check_solution(inst, sol, options.build.strict_mass_balance);
    if (!physical.empty())
      throw std::runtime_error("sweep solution failed the physical check: " +
                               physical.front());

    prev_assignment = raw.values;
    RunResult rr;
    rr.solution = std::move(sol);
    rr.metrics = metrics_from(rr.solution, sweep.base_scenario.name, inst.policy);
    rr.metrics.param_value = value;
    out.push_back(std::move(rr));
  }

  // Self-check on directions that hold for any instance: nonnegative-quantity
  // credit prices help, cost scales hurt. Proven-optimal cells that disagree
  // indicate a solver defect; cells with open gaps only warn.
  int direction = 0;
  switch (sweep.parameter) {
    case SweepParameter::RinPrice:
    case SweepParameter::RngPrice:
    case SweepParameter::Q45Price: direction = +1; break;
    case SweepParameter::TransportCostScale: direction = -1; break;
    default: break;  // LCFS and yield shift penalty terms too; not certified
  }
  if (direction != 0) {
    for (size_t i = 1; i < out.size(); ++i) {
      double prev = out[i - 1].solution.objective;
      double cur = out[i].solution.objective;
      double tol = 1e-7 * std::max({1.0, std::abs(prev), std::abs(cur)});
      bool violated = direction > 0 ? cur < prev - tol : cur > prev + tol;
      if (!violated) continue;
      bool certified = out[i - 1].solution.gap <= 1e-12 &&
                       out[i].solution.gap <= 1e-12;
      std::string msg = "sweep objective not monotone between " +
                        format_number(sweep.values[i - 1]) + " and " +
                        format_number(sweep.values[i]) + " (" +
                        format_number(prev) + " -> " + format_number(cur) + ")";
      if (certified)
        throw std::runtime_error(msg + " despite zero-gap certificates");
      std::cerr << "warning: " << msg << " at nonzero gap\n";
    }
  }
  return out;
}

void write_metrics_csv(const std::filesystem::path& file,
                       const std::vector<RunMetrics>& rows) {
  std::vector<std::string> header = {
      "scenario",      "param_value",  "lcfs_price", "rin_price",
      "q45_price",     "q45_threshold", "rng_pj",     "co2_mt",
      "n_facilities",  "n_sinks",      "profit_per_gj", "gap", "wall_s"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& m : rows) {
    cells.push_back({
        m.scenario,
        std::isnan(m.param_value) ? "" : format_number(m.param_value),
        format_number(m.lcfs_price),
        format_number(m.rin_price),
        format_number(m.q45_price),
        format_number(m.q45_threshold),
        format_number(m.rng_pj),
        format_number(m.co2_mt),
        std::to_string(m.n_facilities),
        std::to_string(m.n_sinks),
        std::isnan(m.profit_per_gj) ? "NA" : format_number(m.profit_per_gj),
        format_number(m.gap),
        format_number(std::round(m.wall_seconds * 1000.0) / 1000.0),
    });
  }
  write_csv(file, header, cells);
}

}  // namespace rngccs
