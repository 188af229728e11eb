#include "rngccs/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "rngccs/technoeconomics.hpp"
#include "rngccs/util.hpp"

namespace rngccs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearProgram base_lp(const MilpModel& model) {
  LinearProgram lp;
  lp.maximize = model.maximize;
  lp.objective.reserve(model.vars.size());
  lp.lower.reserve(model.vars.size());
  lp.upper.reserve(model.vars.size());
  for (const auto& v : model.vars) {
    lp.objective.push_back(v.objective);
    lp.lower.push_back(v.lower);
    // Presolve: tightened upper bounds are valid for every relaxation.
    lp.upper.push_back(std::min(v.upper, v.tight_upper));
  }
  lp.rows.reserve(model.rows.size());
  for (const auto& r : model.rows) {
    LinearProgram::Row row;
    row.coeffs = r.coeffs;
    row.rel = r.rel;
    row.rhs = r.rhs;
    lp.rows.push_back(std::move(row));
  }
  // Presolve: zero threshold makes every facility 45Q-eligible.
  if (model.q45_threshold == 0.0)
    for (size_t j = 0; j < model.vars.size(); ++j)
      if (model.vars[j].family == VarFamily::Q45Eligible) {
        lp.lower[j] = 1.0;
        lp.upper[j] = 1.0;
      }
  return lp;
}

struct Node {
  long id = 0;
  int parent = -1;
  int depth = 0;
  double bound = kInf;  // inherited from parent's LP objective
  int branch_col = -1;
  double fix_lb = 0.0, fix_ub = 1.0;
  std::shared_ptr<Basis> basis;  // parent's optimal basis
  bool open = true;
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const SolverConfig& config)
      : model_(model), config_(config), lp_(base_lp(model)) {
    root_lower_ = lp_.lower;
    root_upper_ = lp_.upper;
    for (size_t j = 0; j < model.vars.size(); ++j)
      if (model.vars[j].binary && lp_.lower[j] < lp_.upper[j])
        binary_cols_.push_back(static_cast<int>(j));
    tie_rank_.resize(model.vars.size(), 0);
    for (size_t j = 0; j < model.vars.size(); ++j)
      tie_rank_[j] = fnv1a64(std::to_string(config.seed) + ":" + std::to_string(j));
    pc_up_sum_.assign(model.vars.size(), 0.0);
    pc_down_sum_.assign(model.vars.size(), 0.0);
    pc_up_n_.assign(model.vars.size(), 0);
    pc_down_n_.assign(model.vars.size(), 0);
  }

  RawSolution run(const std::vector<double>* warm_start) {
    auto t0 = std::chrono::steady_clock::now();
    RawSolution out;

    if (model_.vars.empty()) {
      out.objective = 0.0;
      out.bound = 0.0;
      out.gap = 0.0;
      out.status = SolveStatus::Optimal;
      return out;
    }

    if (warm_start && warm_start->size() == model_.vars.size() &&
        assignment_violation(model_, *warm_start) <= 1e-6 &&
        integral(*warm_start)) {
      incumbent_ = *warm_start;
      incumbent_obj_ = assignment_objective(model_, *warm_start);
      have_incumbent_ = true;
    }

    nodes_.push_back(Node{});
    open_.push_back(0);

    SolveStatus limit_status = SolveStatus::Optimal;
    while (!open_.empty()) {
      double bound = global_bound();
      if (have_incumbent_ && relative_gap(incumbent_obj_, bound) <= config_.gap_tolerance &&
          config_.gap_tolerance > 0)
        break;
      if (processed_ >= config_.node_limit) {
        limit_status = SolveStatus::NodeLimit;
        break;
      }
      double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (elapsed > config_.time_limit_seconds) {
        limit_status = SolveStatus::TimeLimit;
        break;
      }

      int ni = pop_node();
      Node node = nodes_[ni];  // copy: nodes_ may reallocate on push
      if (have_incumbent_ && node.bound <= prune_cut()) continue;

      ++processed_;
      set_node_bounds(ni);
      SimplexOptions sopt;
      sopt.feas_tol = config_.lp_feas_tol;
      LpResult res = solve_lp(lp_, sopt, node.basis.get());
      if (res.status == LpStatus::Stalled)
        res = solve_lp(lp_, sopt, nullptr);  // fresh basis retry
      lp_iters_ += res.iterations;

      if (res.status == LpStatus::Stalled)
        throw std::runtime_error("LP relaxation stalled at node " +
                                 std::to_string(node.id) + ": " + res.message);
      if (res.status == LpStatus::Unbounded)
        throw std::runtime_error("LP relaxation unbounded; model bounds missing");
      if (res.status == LpStatus::Infeasible) continue;

      nodes_[ni].bound = res.objective;
      update_pseudo_cost(node, res.objective);
      if (have_incumbent_ && res.objective <= prune_cut()) continue;

      int frac_col = pick_branch_column(res.x);
      if (frac_col < 0) {
        try_incumbent(res, ni);
        continue;
      }

      auto basis = std::make_shared<Basis>(res.basis);
      double frac = res.x[frac_col] - std::floor(res.x[frac_col]);
      long id_down = next_id_++;
      long id_up = next_id_++;
      Node down{id_down, ni, node.depth + 1, res.objective, frac_col, 0.0, 0.0,
                basis, true};
      Node up{id_up, ni, node.depth + 1, res.objective, frac_col, 1.0, 1.0,
              basis, true};
      if (config_.node_selection == NodeSelection::DepthFirstDive) {
        // Stack order: preferred child (nearer the LP value) pops first.
        if (frac >= 0.5) {
          push_node(std::move(down));
          push_node(std::move(up));
        } else {
          push_node(std::move(up));
          push_node(std::move(down));
        }
      } else {
        push_node(std::move(down));
        push_node(std::move(up));
      }
    }

    double bound = open_.empty() && have_incumbent_ ? incumbent_obj_ : global_bound();
    if (!have_incumbent_) {
      out.status = SolveStatus::NoIncumbent;
      out.bound = bound;
      out.gap = 1.0;
      out.nodes = processed_;
      out.lp_iterations = lp_iters_;
      out.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return out;
    }
    // The reported bound never rises above previously reported bounds and
    // never falls below the incumbent.
    bound = clamp_reported_bound(bound);
    out.values = incumbent_;
    out.objective = incumbent_obj_;
    out.bound = bound;
    out.gap = relative_gap(incumbent_obj_, bound);
    out.nodes = processed_;
    out.lp_iterations = lp_iters_;
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.gap <= 1e-12)
      out.status = SolveStatus::Optimal;
    else if (out.gap <= config_.gap_tolerance)
      out.status = SolveStatus::GapLimit;
    else
      out.status = limit_status == SolveStatus::Optimal ? SolveStatus::GapLimit
                                                        : limit_status;
    return out;
  }

 private:
  const MilpModel& model_;
  const SolverConfig& config_;
  LinearProgram lp_;
  std::vector<double> root_lower_, root_upper_;
  std::vector<int> binary_cols_;
  std::vector<uint64_t> tie_rank_;

  std::vector<Node> nodes_;
  std::vector<int> open_;  // indices into nodes_
  long next_id_ = 1;
  long processed_ = 0;
  long lp_iters_ = 0;

  std::vector<double> incumbent_;
  double incumbent_obj_ = -kInf;
  bool have_incumbent_ = false;
  double reported_bound_ = kInf;

  std::vector<double> pc_up_sum_, pc_down_sum_;
  std::vector<int> pc_up_n_, pc_down_n_;

  double prune_cut() const {
    return incumbent_obj_ + 1e-9 + 1e-9 * std::abs(incumbent_obj_);
  }

  // Monotone nonincreasing view of the global bound, floored at the
  // incumbent so the published gap stays nonnegative.
  double clamp_reported_bound(double candidate) {
    candidate = std::max(candidate, incumbent_obj_);
    reported_bound_ = std::min(reported_bound_, candidate);
    return reported_bound_;
  }

  double global_bound() const {
    double b = have_incumbent_ ? incumbent_obj_ : -kInf;
    for (int ni : open_) b = std::max(b, nodes_[ni].bound);
    return b;
  }

  int pop_node() {
    size_t pick = open_.size() - 1;
    if (config_.node_selection == NodeSelection::BestBound) {
      for (size_t i = 0; i < open_.size(); ++i) {
        const Node& a = nodes_[open_[i]];
        const Node& b = nodes_[open_[pick]];
        if (a.bound > b.bound + 1e-12 ||
            (a.bound > b.bound - 1e-12 && a.id < b.id))
          pick = i;
      }
    }
    int ni = open_[pick];
    open_.erase(open_.begin() + pick);
    return ni;
  }

  void push_node(Node&& n) {
    nodes_.push_back(std::move(n));
    open_.push_back(static_cast<int>(nodes_.size()) - 1);
  }

  void set_node_bounds(int ni) {
    lp_.lower = root_lower_;
    lp_.upper = root_upper_;
    for (int cur = ni; cur > 0; cur = nodes_[cur].parent) {
      const Node& n = nodes_[cur];
      lp_.lower[n.branch_col] = std::max(lp_.lower[n.branch_col], n.fix_lb);
      lp_.upper[n.branch_col] = std::min(lp_.upper[n.branch_col], n.fix_ub);
    }
  }

  bool integral(const std::vector<double>& x) const {
    for (int j : binary_cols_)
      if (std::abs(x[j] - std::round(x[j])) > config_.int_tol) return false;
    return true;
  }

  void update_pseudo_cost(const Node& node, double child_obj) {
    if (node.branch_col < 0 || node.parent < 0) return;
    double parent_obj = nodes_[node.parent].bound;
    if (!std::isfinite(parent_obj)) return;
    double drop = std::max(0.0, parent_obj - child_obj);
    int col = node.branch_col;
    if (node.fix_lb >= 1.0) {
      pc_up_sum_[col] += drop;
      pc_up_n_[col] += 1;
    } else {
      pc_down_sum_[col] += drop;
      pc_down_n_[col] += 1;
    }
  }

  int pick_branch_column(const std::vector<double>& x) const {
    int best = -1;
    double best_score = -1.0;
    uint64_t best_tie = 0;
    for (int j : binary_cols_) {
      if (lp_.lower[j] >= lp_.upper[j]) continue;  // fixed on this path
      double frac = x[j] - std::floor(x[j]);
      double dist = std::min(frac, 1.0 - frac);
      if (dist <= config_.int_tol) continue;
      double score;
      if (config_.branching == BranchingRule::PseudoCost &&
          (pc_up_n_[j] > 0 || pc_down_n_[j] > 0)) {
        double up = pc_up_n_[j] > 0 ? pc_up_sum_[j] / pc_up_n_[j] : 1.0;
        double down = pc_down_n_[j] > 0 ? pc_down_sum_[j] / pc_down_n_[j] : 1.0;
        score = std::max(1e-9, up * (1.0 - frac)) * std::max(1e-9, down * frac);
      } else {
        score = dist;
      }
      if (score > best_score + 1e-12 ||
          (score > best_score - 1e-12 &&
           (best < 0 || tie_rank_[j] < best_tie))) {
        best = j;
        best_score = score;
        best_tie = tie_rank_[j];
      }
    }
    return best;
  }

  // An LP-integral point becomes an incumbent after re-solving the residual
  // LP with the binaries pinned, which clears the tiny integrality slack.
  void try_incumbent(const LpResult& lp_res, int ni) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      set_node_bounds(ni);
      for (int j : binary_cols_) {
        if (lp_.lower[j] >= lp_.upper[j]) continue;
        double v = lp_res.x[j];
        double fix;
        if (attempt == 0) {
          fix = std::round(v);
        } else {
          // Fallback: eligibility rounds down (its threshold row may bind),
          // activations round to nearest.
          fix = model_.vars[j].family == VarFamily::Q45Eligible ? std::floor(v)
                                                                : std::round(v);
        }
        lp_.lower[j] = fix;
        lp_.upper[j] = fix;
      }
      SimplexOptions sopt;
      sopt.feas_tol = config_.lp_feas_tol;
      LpResult fixed = solve_lp(lp_, sopt, lp_res.basis.stat.empty() ? nullptr
                                                                     : &lp_res.basis);
      lp_iters_ += fixed.iterations;
      if (fixed.status != LpStatus::Optimal) continue;
      if (!have_incumbent_ || fixed.objective > incumbent_obj_) {
        incumbent_ = fixed.x;
        // Snap binaries exactly.
        for (int j : binary_cols_) incumbent_[j] = std::round(incumbent_[j]);
        incumbent_obj_ = fixed.objective;
        have_incumbent_ = true;
        if (config_.progress) {
          double b = clamp_reported_bound(global_bound());
          config_.progress("nodes=" + std::to_string(processed_) +
                           " incumbent=" + format_number(incumbent_obj_) +
                           " bound=" + format_number(b) +
                           " gap=" + format_number(relative_gap(incumbent_obj_, b)));
        }
      }
      return;
    }
  }
};

}  // namespace

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(bound)) return 1.0;
  double g = (bound - incumbent) / std::max(std::abs(bound), 1e-9);
  return std::max(0.0, g);
}

RawSolution solve_mip(const MilpModel& model, const SolverConfig& config,
                      const std::vector<double>* warm_start) {
  BranchAndBound bb(model, config);
  return bb.run(warm_start);
}

NetworkSolution branch_and_bound(const MilpModel& model, const SolverConfig& config,
                                 const std::vector<double>* warm_start) {
  return extract_solution(model, solve_mip(model, config, warm_start));
}

double assignment_objective(const MilpModel& model, const std::vector<double>& x) {
  double obj = 0.0;
  for (size_t j = 0; j < model.vars.size(); ++j) obj += model.vars[j].objective * x[j];
  return obj;
}

double assignment_violation(const MilpModel& model, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : model.rows) {
    double activity = 0.0;
    double scale = std::max(1.0, std::abs(row.rhs));
    for (const auto& [col, coef] : row.coeffs) {
      activity += coef * x[col];
      scale = std::max(scale, std::abs(coef * x[col]));
    }
    double viol = 0.0;
    if (row.rel == Relation::Le) viol = activity - row.rhs;
    else if (row.rel == Relation::Ge) viol = row.rhs - activity;
    else viol = std::abs(activity - row.rhs);
    worst = std::max(worst, viol / scale);
  }
  for (size_t j = 0; j < model.vars.size(); ++j) {
    double scale = std::max(1.0, std::isfinite(model.vars[j].tight_upper)
                                     ? model.vars[j].tight_upper
                                     : 1.0);
    worst = std::max(worst, (model.vars[j].lower - x[j]) / scale);
    if (std::isfinite(model.vars[j].upper))
      worst = std::max(worst, (x[j] - model.vars[j].upper) / scale);
  }
  return worst;
}

namespace {

// Greedy allocation state shared across facilities during incumbent build.
struct GreedyState {
  std::vector<double> remaining_supply;
  std::vector<double> remaining_sink_cap;
  std::vector<bool> sink_open;
};

}  // namespace

std::vector<double> greedy_incumbent(const NetworkInstance& inst,
                                     const MilpModel& model) {
  std::vector<double> x(model.vars.size(), 0.0);
  if (model.vars.empty()) return x;

  const auto& pol = inst.policy;
  const auto& params = inst.params;
  CostModel cm = cost_coefficients(inst);
  double mf = inst.feedstock_types.empty() ? 0.6
                                           : inst.feedstock_types[0].methane_fraction;
  double energy_per_m3 = mf * params.ch4_lhv;
  double capture_per_m3 = (1.0 - mf) * params.co2_density * params.capture_efficiency;
  double rin_per_gj = pol.rin_price / pol.gge_energy_gj;
  double capture_penalty = pol.grid_ci * pol.capture_electricity * 1e-6;

  auto pathway = [&](const std::string& key) {
    auto it = pol.pathway_ci.find(key);
    return it == pol.pathway_ci.end() ? pol.benchmark_ci : it->second;
  };
  // Net $ per GJ of gas before capture-side terms.
  auto gas_value_per_gj = [&](const std::string& pathway_key) {
    return pol.rng_price + rin_per_gj +
           pol.lcfs_price * (pol.benchmark_ci - pathway(pathway_key)) * 1e-3 -
           cm.upgrading_per_gj;
  };
  // Net $ per tCO2 captured, before shipping: compression cost + grid CI hit.
  double capture_cost_per_t = cm.capture_per_t + pol.lcfs_price * capture_penalty;

  size_t nf = inst.facilities.size();
  std::vector<std::vector<int>> arcs_into(nf), arcs_out(nf);
  for (size_t a = 0; a < inst.dist_source_facility.size(); ++a)
    arcs_into[inst.dist_source_facility[a].to].push_back(a);
  for (size_t a = 0; a < inst.dist_facility_sink.size(); ++a)
    arcs_out[inst.dist_facility_sink[a].from].push_back(a);

  // Per-tonne value of shipping along arc a, 45Q excluded.
  auto ship_value = [&](int a) {
    const auto& arc = inst.dist_facility_sink[a];
    return pol.lcfs_price * (1.0 - pol.truck_ef * 1e-6 * arc.miles) -
           cm.co2_arc_cost[a] - cm.sink_unit[arc.to];
  };

  // Ranking pass: standalone profit estimate assuming full supplies and
  // already-open sinks. Ordering heuristic only; commitment below uses the
  // exact model objective.
  struct Ranked {
    int j;
    double profit;
  };
  std::vector<Ranked> ranked;
  for (size_t j = 0; j < nf; ++j) {
    const auto& fac = inst.facilities[j];
    double best_ship = 0.0;
    for (int a : arcs_out[j]) best_ship = std::max(best_ship, ship_value(a));
    double profit = -cm.facility_fixed[j];
    double capture = fac.fixed_biogas * capture_per_m3;
    if (fac.fixed_biogas > 0) {
      std::string key = fac.kind == FacilityKind::LandfillGas ? "landfill_gas"
                                                              : "wastewater";
      profit += fac.fixed_biogas * energy_per_m3 * gas_value_per_gj(key) +
                capture * (std::max(0.0, best_ship) - capture_cost_per_t);
    }
    double cap_left = fac.capacity;
    for (int a : arcs_into[j]) {
      const auto& arc = inst.dist_source_facility[a];
      const auto& src = inst.sources[arc.from];
      int fi = inst.feedstock_index(src.feedstock);
      double yield = inst.feedstock_types[fi].biogas_yield;
      double net = yield * energy_per_m3 * gas_value_per_gj(src.feedstock) +
                   yield * capture_per_m3 *
                       (std::max(0.0, best_ship) - capture_cost_per_t) -
                   cm.feedstock_arc_cost[a] - cm.facility_processing[arc.to];
      if (net <= 0) continue;
      double take = std::min(src.supply, cap_left);
      profit += net * take;
      capture += take * yield * capture_per_m3;
      cap_left -= take;
      if (cap_left <= 0) break;
    }
    if (best_ship > 0 && capture >= pol.q45_threshold)
      profit += pol.q45_price * capture;
    if (profit > 0) ranked.push_back({static_cast<int>(j), profit});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return a.profit > b.profit || (a.profit == b.profit && a.j < b.j);
  });

  GreedyState st;
  st.remaining_supply.reserve(inst.sources.size());
  for (const auto& s : inst.sources) st.remaining_supply.push_back(s.supply);
  for (const auto& k : inst.sinks) st.remaining_sink_cap.push_back(k.capacity);
  st.sink_open.assign(inst.sinks.size(), false);

  for (const auto& r : ranked) {
    int j = r.j;
    const auto& fac = inst.facilities[j];
    GreedyState saved = st;
    std::vector<double> trial = x;

    double best_ship = 0.0;
    for (int a : arcs_out[j])
      if (st.remaining_sink_cap[inst.dist_facility_sink[a].to] > 0)
        best_ship = std::max(best_ship, ship_value(a));

    // Feedstock allocation against remaining supplies, best margins first.
    double cap_left = fac.capacity;
    double biogas = fac.fixed_biogas;
    std::vector<std::pair<double, int>> order;  // (net per wt, arc)
    for (int a : arcs_into[j]) {
      const auto& arc = inst.dist_source_facility[a];
      const auto& src = inst.sources[arc.from];
      int fi = inst.feedstock_index(src.feedstock);
      double yield = inst.feedstock_types[fi].biogas_yield;
      double net = yield * energy_per_m3 * gas_value_per_gj(src.feedstock) +
                   yield * capture_per_m3 *
                       (std::max(0.0, best_ship) - capture_cost_per_t) -
                   cm.feedstock_arc_cost[a] - cm.facility_processing[arc.to];
      if (net > 0) order.push_back({net, a});
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (const auto& [net, a] : order) {
      if (cap_left <= 0) break;
      const auto& arc = inst.dist_source_facility[a];
      double take = std::min(st.remaining_supply[arc.from], cap_left);
      if (take <= 0) continue;
      int fi = inst.feedstock_index(inst.sources[arc.from].feedstock);
      trial[model.x_col[a]] += take;
      st.remaining_supply[arc.from] -= take;
      cap_left -= take;
      biogas += take * inst.feedstock_types[fi].biogas_yield;
    }

    double capture = biogas * capture_per_m3;

    // Ship captured CO2 while per-tonne value stays positive.
    bool eligible = capture > 0 && capture >= pol.q45_threshold;
    double q45_bonus = eligible ? pol.q45_price : 0.0;
    std::vector<std::pair<double, int>> ship_order;
    for (int a : arcs_out[j]) ship_order.push_back({ship_value(a) + q45_bonus, a});
    std::sort(ship_order.begin(), ship_order.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    double unshipped = capture;
    double shipped = 0.0;
    for (const auto& [value, a] : ship_order) {
      if (value <= 0 || unshipped <= 0) break;
      const auto& arc = inst.dist_facility_sink[a];
      int k = arc.to;
      double can = std::min(unshipped, st.remaining_sink_cap[k]);
      if (can <= 0) continue;
      double open_cost = st.sink_open[k] ? 0.0 : cm.sink_fixed[k];
      if (value * can - open_cost <= 0) continue;
      if (!st.sink_open[k]) {
        st.sink_open[k] = true;
        trial[model.z_col[k]] = 1.0;
      }
      trial[model.t_col[a]] += can;
      trial[model.s_col[k]] += can;
      st.remaining_sink_cap[k] -= can;
      shipped += can;
      unshipped -= can;
    }

    if (model.strict_mass_balance && unshipped > 1e-9) {
      st = saved;  // cannot place all captured CO2: skip facility
      continue;
    }

    trial[model.y_col[j]] = 1.0;
    trial[model.b_col[j]] = biogas;
    trial[model.m_col[j]] = biogas * energy_per_m3;
    trial[model.c_col[j]] = capture;
    bool q_on = model.q45_threshold == 0.0 ? true : (capture >= model.q45_threshold);
    trial[model.q_col[j]] = q_on ? 1.0 : 0.0;
    trial[model.r_col[j]] = q_on ? shipped : 0.0;

    // Commit only when the exact objective improves.
    if (assignment_objective(model, trial) <= assignment_objective(model, x)) {
      st = saved;
      continue;
    }
    x = std::move(trial);
  }

  // Zero-threshold presolve fixes q = 1 everywhere, including idle sites.
  if (model.q45_threshold == 0.0)
    for (size_t j = 0; j < nf; ++j) x[model.q_col[j]] = 1.0;

  if (assignment_objective(model, x) <= 0.0 || assignment_violation(model, x) > 1e-9)
    return std::vector<double>(model.vars.size(), 0.0);
  return x;
}

}  // namespace rngccs
