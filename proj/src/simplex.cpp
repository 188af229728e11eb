#include "rngccs/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rngccs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SparseCol {
  std::vector<std::pair<int, double>> entries;  // (row, value)
};

// Bounded-variable revised simplex over scaled data. Columns 0..n-1 are
// structural, n..n+m-1 are slacks (coefficient +1 in their row).
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), n_(lp.num_cols()), m_(lp.num_rows()), total_(n_ + m_) {
    build();
  }

  LpResult run(const Basis* warm) {
    init_basis(warm);
    if (!factorize()) reset_to_slack_basis();
    compute_basic_values();

    LpResult res;
    // Phase 1: drive bound violations to zero.
    PhaseOutcome p1 = iterate(/*phase1=*/true);
    if (p1 == PhaseOutcome::IterationLimit) return stalled("iteration limit in phase 1");
    if (p1 == PhaseOutcome::NumericalTrouble) return stalled(trouble_);
    if (infeasibility() > total_feas_tol()) {
      res.status = LpStatus::Infeasible;
      res.iterations = iters_;
      return res;
    }
    // Phase 2: optimize.
    PhaseOutcome p2 = iterate(/*phase1=*/false);
    if (p2 == PhaseOutcome::IterationLimit) return stalled("iteration limit in phase 2");
    if (p2 == PhaseOutcome::NumericalTrouble) return stalled(trouble_);
    if (p2 == PhaseOutcome::Unbounded) {
      res.status = LpStatus::Unbounded;
      res.iterations = iters_;
      return res;
    }
    return finish();
  }

 private:
  enum class PhaseOutcome { Done, Unbounded, IterationLimit, NumericalTrouble };

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int n_, m_, total_;
  double sense_ = 1.0;  // -1 when the input minimizes; internal sense is maximize

  std::vector<SparseCol> cols_;   // scaled, all columns incl. slacks
  std::vector<double> cost_;      // scaled objective (maximize)
  std::vector<double> lo_, up_;   // scaled bounds
  std::vector<double> rhs_;       // scaled
  std::vector<double> row_scale_, col_scale_;

  std::vector<uint8_t> stat_;
  std::vector<int> basic_;        // column basic in each row position
  std::vector<double> xval_;      // nonbasic: bound value; basic: current value
  std::vector<double> binv_;      // m x m row-major
  int iters_ = 0;
  int pivots_since_refactor_ = 0;
  int degenerate_streak_ = 0;
  std::string trouble_;

  double cost_scale_ = 1.0;

  void build() {
    cols_.resize(total_);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, v] : lp_.rows[i].coeffs)
        if (v != 0.0) cols_[j].entries.push_back({i, v});
    for (int i = 0; i < m_; ++i) cols_[n_ + i].entries.push_back({i, 1.0});

    // Geometric-mean equilibration, factors rounded to powers of two so
    // scaling itself introduces no rounding error.
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(total_, 1.0);
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (const auto& [i, v] : cols_[j].entries) {
          double a = std::abs(v) * row_scale_[i] * col_scale_[j];
          if (a > 0) {
            rmin[i] = std::min(rmin[i], a);
            rmax[i] = std::max(rmax[i], a);
          }
        }
      for (int i = 0; i < m_; ++i)
        if (rmax[i] > 0)
          row_scale_[i] *= std::exp2(-std::round(std::log2(std::sqrt(rmin[i] * rmax[i]))));
      std::vector<double> cmin(total_, kInf), cmax(total_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (const auto& [i, v] : cols_[j].entries) {
          double a = std::abs(v) * row_scale_[i] * col_scale_[j];
          if (a > 0) {
            cmin[j] = std::min(cmin[j], a);
            cmax[j] = std::max(cmax[j], a);
          }
        }
      for (int j = 0; j < n_; ++j)
        if (cmax[j] > 0)
          col_scale_[j] *= std::exp2(-std::round(std::log2(std::sqrt(cmin[j] * cmax[j]))));
    }

    for (int j = 0; j < n_; ++j)
      for (auto& [i, v] : cols_[j].entries) v *= row_scale_[i] * col_scale_[j];
    // Slack columns keep coefficient 1: the slack variable absorbs the row
    // scale, and its bounds (0, +/-inf) are scale-invariant.

    // x_internal = x / col_scale, so internal costs carry the col scale.
    sense_ = lp_.maximize ? 1.0 : -1.0;
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j)
      cost_[j] = sense_ * lp_.objective[j] * col_scale_[j];
    cost_scale_ = 1.0;
    for (int j = 0; j < n_; ++j) cost_scale_ = std::max(cost_scale_, std::abs(cost_[j]));

    lo_.assign(total_, 0.0);
    up_.assign(total_, kInf);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp_.lower[j] / col_scale_[j];
      up_[j] = lp_.upper[j] / col_scale_[j];
    }
    rhs_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      rhs_[i] = lp_.rows[i].rhs * row_scale_[i];
      switch (lp_.rows[i].rel) {
        case Relation::Le: lo_[n_ + i] = 0.0; up_[n_ + i] = kInf; break;
        case Relation::Eq: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
        case Relation::Ge: lo_[n_ + i] = -kInf; up_[n_ + i] = 0.0; break;
      }
    }
  }

  double bound_tol(int j) const {
    double scale = 1.0;
    if (std::isfinite(lo_[j])) scale = std::max(scale, std::abs(lo_[j]));
    if (std::isfinite(up_[j])) scale = std::max(scale, std::abs(up_[j]));
    return opt_.feas_tol * scale;
  }

  double total_feas_tol() const { return opt_.feas_tol * (1.0 + m_); }

  void init_basis(const Basis* warm) {
    stat_.assign(total_, Basis::AtLower);
    if (warm && static_cast<int>(warm->stat.size()) == total_) {
      stat_ = warm->stat;
      int nb = static_cast<int>(std::count(stat_.begin(), stat_.end(),
                                           static_cast<uint8_t>(Basis::Basic)));
      if (nb != m_) stat_.assign(total_, Basis::AtLower);  // unusable hint
    }
    bool have_basis = std::count(stat_.begin(), stat_.end(),
                                 static_cast<uint8_t>(Basis::Basic)) == m_;
    if (!have_basis) {
      for (int j = 0; j < n_; ++j) stat_[j] = default_nonbasic_stat(j);
      for (int i = 0; i < m_; ++i) stat_[n_ + i] = Basis::Basic;
    } else {
      // Normalize nonbasic statuses against current bounds (a warm basis may
      // come from a problem with different bound fixings).
      for (int j = 0; j < total_; ++j) {
        if (stat_[j] == Basis::Basic) continue;
        stat_[j] = normalize_nonbasic(j, stat_[j]);
      }
    }
    rebuild_basic_list();
    for (int j = 0; j < total_; ++j) xval_[j] = nonbasic_value(j);
  }

  uint8_t default_nonbasic_stat(int j) const {
    if (std::isfinite(lo_[j])) return Basis::AtLower;
    if (std::isfinite(up_[j])) return Basis::AtUpper;
    return Basis::FreeZero;
  }

  uint8_t normalize_nonbasic(int j, uint8_t s) const {
    if (s == Basis::AtLower && !std::isfinite(lo_[j])) return default_nonbasic_stat(j);
    if (s == Basis::AtUpper && !std::isfinite(up_[j])) return default_nonbasic_stat(j);
    if (s == Basis::FreeZero && (std::isfinite(lo_[j]) || std::isfinite(up_[j])))
      return default_nonbasic_stat(j);
    return s;
  }

  double nonbasic_value(int j) const {
    switch (stat_[j]) {
      case Basis::AtLower: return lo_[j];
      case Basis::AtUpper: return up_[j];
      case Basis::FreeZero: return 0.0;
      default: return xval_[j];
    }
  }

  void rebuild_basic_list() {
    basic_.clear();
    xval_.resize(total_);
    for (int j = 0; j < total_; ++j)
      if (stat_[j] == Basis::Basic) basic_.push_back(j);
  }

  void reset_to_slack_basis() {
    for (int j = 0; j < n_; ++j) stat_[j] = default_nonbasic_stat(j);
    for (int i = 0; i < m_; ++i) stat_[n_ + i] = Basis::Basic;
    rebuild_basic_list();
    for (int j = 0; j < total_; ++j) xval_[j] = nonbasic_value(j);
    bool ok = factorize();
    (void)ok;  // identity basis cannot fail
  }

  // Dense Gauss-Jordan inverse of the basis matrix. Returns false when the
  // basis is numerically singular.
  bool factorize() {
    if (static_cast<int>(basic_.size()) != m_) return false;
    std::vector<double> a(static_cast<size_t>(m_) * m_, 0.0);
    for (int p = 0; p < m_; ++p)
      for (const auto& [i, v] : cols_[basic_[p]].entries)
        a[static_cast<size_t>(i) * m_ + p] = v;
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;

    std::vector<int> prow(m_);
    std::vector<bool> used(m_, false);
    for (int k = 0; k < m_; ++k) {
      int piv = -1;
      double best = 1e-11;
      for (int i = 0; i < m_; ++i) {
        if (used[i]) continue;
        double v = std::abs(a[static_cast<size_t>(i) * m_ + k]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (piv < 0) return false;
      used[piv] = true;
      prow[k] = piv;
      double d = a[static_cast<size_t>(piv) * m_ + k];
      for (int c = 0; c < m_; ++c) {
        a[static_cast<size_t>(piv) * m_ + c] /= d;
        binv_[static_cast<size_t>(piv) * m_ + c] /= d;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == piv) continue;
        double f = a[static_cast<size_t>(i) * m_ + k];
        if (f == 0.0) continue;
        for (int c = 0; c < m_; ++c) {
          a[static_cast<size_t>(i) * m_ + c] -= f * a[static_cast<size_t>(piv) * m_ + c];
          binv_[static_cast<size_t>(i) * m_ + c] -=
              f * binv_[static_cast<size_t>(piv) * m_ + c];
        }
      }
    }
    // Reorder: basic variable k lives at row position prow[k]; we want
    // binv rows aligned so row p corresponds to basic_[p]. After Gauss-Jordan
    // A^-1 rows are already correct once permuted: row prow[k] of the reduced
    // system expresses basic k. Permute basic_ accordingly.
    std::vector<int> newbasic(m_);
    for (int k = 0; k < m_; ++k) newbasic[prow[k]] = basic_[k];
    basic_ = std::move(newbasic);
    pivots_since_refactor_ = 0;
    return true;
  }

  void compute_basic_values() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < total_; ++j) {
      if (stat_[j] == Basis::Basic) continue;
      double v = nonbasic_value(j);
      xval_[j] = v;
      if (v == 0.0) continue;
      for (const auto& [i, a] : cols_[j].entries) r[i] -= a * v;
    }
    for (int p = 0; p < m_; ++p) {
      double s = 0.0;
      const double* row = &binv_[static_cast<size_t>(p) * m_];
      for (int i = 0; i < m_; ++i) s += row[i] * r[i];
      xval_[basic_[p]] = s;
    }
  }

  double infeasibility() const {
    double inf = 0.0;
    for (int p = 0; p < m_; ++p) {
      int j = basic_[p];
      if (xval_[j] < lo_[j]) inf += lo_[j] - xval_[j];
      if (xval_[j] > up_[j]) inf += xval_[j] - up_[j];
    }
    return inf;
  }

  std::vector<double> price_duals(bool phase1) const {
    std::vector<double> cb(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      int j = basic_[p];
      if (phase1) {
        double t = bound_tol(j);
        if (xval_[j] > up_[j] + t) cb[p] = 1.0;
        else if (xval_[j] < lo_[j] - t) cb[p] = -1.0;
      } else {
        cb[p] = cost_[j];
      }
    }
    std::vector<double> y(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      if (cb[p] == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(p) * m_];
      for (int i = 0; i < m_; ++i) y[i] += cb[p] * row[i];
    }
    return y;
  }

  // Reduced value governing eligibility; see selection rules in iterate().
  double reduced(int j, const std::vector<double>& y, bool phase1) const {
    double ya = 0.0;
    for (const auto& [i, v] : cols_[j].entries) ya += y[i] * v;
    return phase1 ? ya : cost_[j] - ya;
  }

  PhaseOutcome iterate(bool phase1) {
    while (iters_ < opt_.max_iterations) {
      if (phase1 && infeasibility() <= total_feas_tol()) return PhaseOutcome::Done;

      auto y = price_duals(phase1);
      double tol_d = opt_.opt_tol * (phase1 ? 1.0 : (1.0 + cost_scale_));
      bool bland = degenerate_streak_ > 64;

      int enter = -1, sigma = 0;
      double best = tol_d;
      std::vector<int> rejected;
      for (;;) {
        enter = -1;
        for (int j = 0; j < total_; ++j) {
          if (stat_[j] == Basis::Basic) continue;
          if (lo_[j] == up_[j]) continue;  // fixed
          if (std::find(rejected.begin(), rejected.end(), j) != rejected.end())
            continue;
          double rho = reduced(j, y, phase1);
          int sig = 0;
          // Phase 1 improves infeasibility when sigma*rho > 0; phase 2
          // improves the (maximized) objective when sigma*rho > 0 as well,
          // with rho the classic reduced cost.
          if (stat_[j] == Basis::AtLower && rho > tol_d) sig = +1;
          else if (stat_[j] == Basis::AtUpper && rho < -tol_d) sig = -1;
          else if (stat_[j] == Basis::FreeZero && std::abs(rho) > tol_d)
            sig = rho > 0 ? +1 : -1;
          if (sig == 0) continue;
          if (bland) {
            enter = j;
            sigma = sig;
            break;
          }
          if (std::abs(rho) > best) {
            best = std::abs(rho);
            enter = j;
            sigma = sig;
          }
        }
        if (enter < 0) {
          if (!rejected.empty() && pivots_since_refactor_ > 0) {
            // All candidates had bad pivots; refactorize and re-price (the
            // reset may change the basis, so the duals must be rebuilt).
            if (!factorize()) reset_to_slack_basis();
            compute_basic_values();
            break;
          }
          return PhaseOutcome::Done;  // optimal / phase-1 stuck (checked by caller)
        }

        // FTRAN: w = Binv * A_enter.
        std::vector<double> w(m_, 0.0);
        for (const auto& [i, v] : cols_[enter].entries)
          for (int p = 0; p < m_; ++p) w[p] += binv_[static_cast<size_t>(p) * m_ + i] * v;

        double wmax = 0.0;
        for (double v : w) wmax = std::max(wmax, std::abs(v));

        // Ratio test.
        double theta = kInf;
        int block = -1;      // basic position
        int block_side = 0;  // +1 upper, -1 lower
        double span = up_[enter] - lo_[enter];
        if (std::isfinite(span)) theta = span;

        for (int p = 0; p < m_; ++p) {
          int bj = basic_[p];
          double delta = -sigma * w[p];
          if (std::abs(delta) < 1e-11 * (1.0 + wmax)) continue;
          double v = xval_[bj];
          double t = bound_tol(bj);
          double limit = kInf;
          int side = 0;
          if (phase1 && v < lo_[bj] - t) {
            if (delta > 0) { limit = (lo_[bj] - v) / delta; side = -1; }
          } else if (phase1 && v > up_[bj] + t) {
            if (delta < 0) { limit = (up_[bj] - v) / delta; side = +1; }
          } else {
            if (delta > 0 && std::isfinite(up_[bj])) {
              limit = (up_[bj] - v) / delta; side = +1;
            } else if (delta < 0 && std::isfinite(lo_[bj])) {
              limit = (lo_[bj] - v) / delta; side = -1;
            }
          }
          if (limit < -1e-12) limit = 0.0;  // tiny negative from roundoff
          if (!std::isfinite(limit)) continue;
          double tie =
              1e-12 * (1.0 + (std::isfinite(theta) ? std::abs(theta) : 0.0));
          if (limit < theta - tie ||
              (limit < theta + tie && block >= 0 &&
               std::abs(w[p]) > std::abs(w[block]))) {
            theta = std::max(0.0, limit);
            block = p;
            block_side = side;
          }
        }

        if (!std::isfinite(theta)) {
          if (phase1) {
            trouble_ = "phase-1 ray; infeasibility cannot decrease to a vertex";
            return PhaseOutcome::NumericalTrouble;
          }
          return PhaseOutcome::Unbounded;
        }

        if (block >= 0 && std::abs(w[block]) < 1e-9 * (1.0 + wmax)) {
          rejected.push_back(enter);  // unstable pivot; try another column
          continue;
        }

        ++iters_;
        degenerate_streak_ = theta <= 1e-12 ? degenerate_streak_ + 1 : 0;

        if (block < 0) {
          // Bound flip: entering runs to its opposite bound.
          for (int p = 0; p < m_; ++p) xval_[basic_[p]] += -sigma * w[p] * theta;
          stat_[enter] = sigma > 0 ? Basis::AtUpper : Basis::AtLower;
          xval_[enter] = nonbasic_value(enter);
        } else {
          double enter_val = xval_[enter] + sigma * theta;
          for (int p = 0; p < m_; ++p)
            if (p != block) xval_[basic_[p]] += -sigma * w[p] * theta;
          int leave = basic_[block];
          stat_[leave] = block_side > 0 ? Basis::AtUpper : Basis::AtLower;
          xval_[leave] = nonbasic_value(leave);
          stat_[enter] = Basis::Basic;
          xval_[enter] = enter_val;
          basic_[block] = enter;

          // Product-form update of the dense inverse.
          double piv = w[block];
          double* brow = &binv_[static_cast<size_t>(block) * m_];
          for (int c = 0; c < m_; ++c) brow[c] /= piv;
          for (int p = 0; p < m_; ++p) {
            if (p == block) continue;
            double f = w[p];
            if (f == 0.0) continue;
            double* prow_ = &binv_[static_cast<size_t>(p) * m_];
            for (int c = 0; c < m_; ++c) prow_[c] -= f * brow[c];
          }
          if (++pivots_since_refactor_ >= opt_.refactor_every) {
            if (!factorize()) reset_to_slack_basis();
            compute_basic_values();
          }
        }
        break;  // pricing round done; loop to next iteration
      }
    }
    return PhaseOutcome::IterationLimit;
  }

  // Rough basis condition estimate: ||B||_inf * ||Binv||_inf.
  double condition_estimate() const {
    std::vector<double> row_norm(m_, 0.0);
    for (int p = 0; p < m_; ++p)
      for (const auto& [i, v] : cols_[basic_[p]].entries)
        row_norm[i] += std::abs(v);
    double b_norm = 0.0;
    for (double v : row_norm) b_norm = std::max(b_norm, v);
    double binv_norm = 0.0;
    for (int p = 0; p < m_; ++p) {
      double s = 0.0;
      for (int c = 0; c < m_; ++c)
        s += std::abs(binv_[static_cast<size_t>(p) * m_ + c]);
      binv_norm = std::max(binv_norm, s);
    }
    return b_norm * binv_norm;
  }

  LpResult stalled(const std::string& why) {
    LpResult res;
    res.status = LpStatus::Stalled;
    res.iterations = iters_;
    char cond[32];
    std::snprintf(cond, sizeof(cond), "%.3g", condition_estimate());
    res.message = why + " (iterations " + std::to_string(iters_) +
                  ", basis condition estimate " + cond + ")";
    return res;
  }

  LpResult finish() {
    // Clean refactorization before reporting.
    if (!factorize()) reset_to_slack_basis();
    compute_basic_values();

    LpResult res;
    res.status = LpStatus::Optimal;
    res.iterations = iters_;
    res.x.resize(n_);
    for (int j = 0; j < n_; ++j) res.x[j] = xval_[j] * col_scale_[j];

    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += lp_.objective[j] * res.x[j];
    res.objective = obj;

    // Duals in original units and the problem's own optimization sense.
    auto y = price_duals(false);
    res.row_duals.resize(m_);
    for (int i = 0; i < m_; ++i) res.row_duals[i] = sense_ * y[i] * row_scale_[i];

    // Dual objective: y'b plus reduced costs against active bounds.
    double dual = 0.0;
    for (int i = 0; i < m_; ++i) dual += res.row_duals[i] * lp_.rows[i].rhs;
    std::vector<double> row_activity(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, v] : lp_.rows[i].coeffs) row_activity[i] += v * res.x[j];
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == Basis::Basic) continue;
      // Reduced cost in original space: d_j = c_j - y'a_j.
      double d = lp_.objective[j];
      for (const auto& [i, v] : original_column(j)) d -= res.row_duals[i] * v;
      dual += d * res.x[j];
    }
    for (int i = 0; i < m_; ++i) {
      if (stat_[n_ + i] == Basis::Basic) continue;
      double slack = lp_.rows[i].rhs - row_activity[i];
      dual += (-res.row_duals[i]) * slack;
    }
    res.dual_objective = dual;

    res.basis.stat = stat_;
    return res;
  }

  std::vector<std::pair<int, double>> original_column(int j) const {
    std::vector<std::pair<int, double>> out;
    for (const auto& [i, v] : cols_[j].entries)
      out.push_back({i, v / (row_scale_[i] * col_scale_[j])});
    return out;
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options,
                  const Basis* warm_start) {
  if (lp.num_cols() == 0) {
    // Degenerate but legal: feasibility is just the rows' constants.
    LpResult res;
    res.status = LpStatus::Optimal;
    for (const auto& r : lp.rows) {
      bool ok = (r.rel == Relation::Le && 0.0 <= r.rhs + options.feas_tol) ||
                (r.rel == Relation::Ge && 0.0 >= r.rhs - options.feas_tol) ||
                (r.rel == Relation::Eq && std::abs(r.rhs) <= options.feas_tol);
      if (!ok) {
        res.status = LpStatus::Infeasible;
        break;
      }
    }
    res.row_duals.assign(lp.rows.size(), 0.0);
    return res;
  }
  Simplex solver(lp, options);
  return solver.run(warm_start);
}

}  // namespace rngccs
