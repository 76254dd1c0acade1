#include "gridres/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gridres {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical: return "numerical";
  }
  return "unknown";
}

int LinearProgram::add_var(double lb, double ub, double obj, std::string name) {
  lower.push_back(lb);
  upper.push_back(ub);
  objective.push_back(obj);
  var_names.push_back(std::move(name));
  start_hint.push_back(0);
  return num_vars++;
}

void LinearProgram::add_row(double lo, double hi,
                            std::vector<std::pair<int, double>> terms) {
  rows.push_back(Row{lo, hi, std::move(terms)});
}

void LinearProgram::validate() const {
  input_check(num_vars >= 0, "lp: negative variable count");
  input_check(static_cast<int>(objective.size()) == num_vars &&
                  static_cast<int>(lower.size()) == num_vars &&
                  static_cast<int>(upper.size()) == num_vars,
              "lp: bound/objective arrays inconsistent with num_vars");
  for (int j = 0; j < num_vars; ++j) {
    input_check(!std::isnan(objective[j]) && std::isfinite(objective[j]),
                "lp: objective coefficient not finite");
    input_check(!std::isnan(lower[j]) && !std::isnan(upper[j]),
                "lp: variable bound is NaN");
    input_check(lower[j] <= upper[j], "lp: variable with lower > upper");
  }
  for (const Row& r : rows) {
    input_check(!std::isnan(r.lo) && !std::isnan(r.hi), "lp: row bound NaN");
    input_check(r.lo <= r.hi, "lp: row with lo > hi");
    for (const auto& [var, coef] : r.terms) {
      input_check(var >= 0 && var < num_vars, "lp: row references bad variable");
      input_check(std::isfinite(coef), "lp: row coefficient not finite");
    }
  }
}

namespace {

constexpr double kPivotTol = 1e-9;   // reduced-cost / ratio tolerances
constexpr double kFeasTol = 1e-8;    // bound violation considered infeasible
constexpr double kZeroTol = 1e-11;   // direction entries treated as zero
constexpr int kMaxIters = 50000;
constexpr int kRefreshEvery = 96;    // basis inverse refactorization cadence

// Bounded-variable revised simplex with a dense basis inverse.
//
// Internal form: every row i becomes  a_i·x − s_i = 0  with slack bounds
// [lo_i, hi_i]; the slack basis makes B = −I initially. Feasibility is
// restored by a composite phase 1 (cost −1/+1 on out-of-bound basics), then
// the true objective takes over. Entering variable: Dantzig (most negative
// eligible reduced cost, lowest index on ties); after a run of degenerate
// pivots, Bland's rule (lowest eligible index) until progress resumes, which
// guarantees finiteness. Leaving variable: minimum ratio, ties to the lowest
// column index.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp)
      : lp_(lp),
        n_(lp.num_vars),
        m_(static_cast<int>(lp.rows.size())),
        total_(n_ + m_) {}

  LpSolution run() {
    build();
    LpSolution sol;
    if (m_ == 0) {
      // Pure bound minimization.
      sol.x.assign(n_, 0.0);
      for (int j = 0; j < n_; ++j) {
        double c = lp_.objective[j];
        if (c > 0 || (c == 0 && std::isfinite(lb_[j])))
          sol.x[j] = lb_[j];
        else
          sol.x[j] = ub_[j];
        if (!std::isfinite(sol.x[j])) {
          if (std::isfinite(lb_[j])) sol.x[j] = lb_[j];
          else if (std::isfinite(ub_[j])) sol.x[j] = ub_[j];
          else sol.x[j] = 0.0;
        }
        if (c != 0 && !std::isfinite(sol.x[j])) {
          sol.status = LpStatus::unbounded;
          return sol;
        }
        if (lb_[j] > ub_[j]) {
          sol.status = LpStatus::infeasible;
          return sol;
        }
        sol.objective += c * sol.x[j];
      }
      sol.status = LpStatus::optimal;
      return sol;
    }

    int iters = 0;
    int degenerate_streak = 0;
    bool bland = false;
    while (true) {
      if (iters >= kMaxIters) {
        sol.status = LpStatus::iteration_limit;
        sol.iterations = iters;
        return sol;
      }
      if (iters > 0 && iters % kRefreshEvery == 0) {
        if (!refresh()) {
          sol.status = LpStatus::numerical;
          sol.iterations = iters;
          return sol;
        }
      }

      const bool phase1 = compute_infeasibility() > kFeasTol;
      price(phase1);

      int enter = -1, dir = 0;
      double best = kPivotTol;
      for (int j = 0; j < total_; ++j) {
        if (basic_pos_[j] >= 0) continue;
        double d = d_[j];
        int cand_dir = 0;
        if (status_[j] == kAtLower || status_[j] == kFree) {
          if (d < -kPivotTol) cand_dir = +1;
        }
        if (cand_dir == 0 && (status_[j] == kAtUpper || status_[j] == kFree)) {
          if (d > kPivotTol) cand_dir = -1;
        }
        if (cand_dir == 0) continue;
        if (bland) {  // lowest eligible index
          enter = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) {
        if (phase1) {
          sol.status = LpStatus::infeasible;
          sol.iterations = iters;
          return sol;
        }
        return finish(sol, iters);
      }

      ++iters;
      double step = pivot(enter, dir, phase1);
      if (std::isnan(step)) {
        sol.status = phase1 ? LpStatus::numerical : LpStatus::unbounded;
        // A numerically stuck phase-1 direction is indistinguishable from
        // unboundedness in phase 2; phase 1 is always bounded below.
        sol.iterations = iters;
        return sol;
      }
      if (step <= kZeroTol) {
        if (++degenerate_streak > 40) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
    }
  }

 private:
  enum VarStatus : int8_t { kAtLower, kAtUpper, kFree, kBasic };

  const LinearProgram& lp_;
  int n_, m_, total_;
  std::vector<std::vector<std::pair<int, double>>> col_;  // structural columns
  std::vector<double> lb_, ub_;
  std::vector<int8_t> status_;
  std::vector<double> xval_;      // current value of every column
  std::vector<int> basic_;        // row -> column
  std::vector<int> basic_pos_;    // column -> row or -1
  std::vector<double> binv_;      // m x m row-major
  std::vector<double> d_;         // reduced costs per column
  std::vector<double> y_;         // simplex multipliers
  std::vector<double> w_;         // Binv * A_enter

  void build() {
    col_.assign(n_, {});
    for (int i = 0; i < m_; ++i)
      for (const auto& [var, coef] : lp_.rows[i].terms)
        if (coef != 0.0) col_[var].emplace_back(i, coef);
    // Deterministic column order regardless of row construction order.
    for (auto& c : col_) std::sort(c.begin(), c.end());

    lb_.resize(total_);
    ub_.resize(total_);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lp_.lower[j];
      ub_[j] = lp_.upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = lp_.rows[i].lo;
      ub_[n_ + i] = lp_.rows[i].hi;
    }

    status_.assign(total_, kAtLower);
    xval_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      int8_t hint = j < static_cast<int>(lp_.start_hint.size())
                        ? lp_.start_hint[j]
                        : int8_t{0};
      bool lo_ok = std::isfinite(lb_[j]), hi_ok = std::isfinite(ub_[j]);
      if (hint < 0 && lo_ok) {
        status_[j] = kAtLower;
      } else if (hint > 0 && hi_ok) {
        status_[j] = kAtUpper;
      } else if (lo_ok && hi_ok) {
        status_[j] = std::abs(lb_[j]) <= std::abs(ub_[j]) ? kAtLower : kAtUpper;
      } else if (lo_ok) {
        status_[j] = kAtLower;
      } else if (hi_ok) {
        status_[j] = kAtUpper;
      } else {
        status_[j] = kFree;
      }
      xval_[j] = status_[j] == kAtLower   ? lb_[j]
                 : status_[j] == kAtUpper ? ub_[j]
                                          : 0.0;
    }

    basic_.resize(m_);
    basic_pos_.assign(total_, -1);
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      basic_pos_[n_ + i] = i;
      status_[n_ + i] = kBasic;
      binv_[static_cast<size_t>(i) * m_ + i] = -1.0;  // slack coefficient is −1
    }
    recompute_basics();
    d_.assign(total_, 0.0);
    y_.assign(m_, 0.0);
    w_.assign(m_, 0.0);
  }

  // x_B = −Binv · (sum over nonbasic columns of A_j x_j).
  void recompute_basics() {
    std::vector<double> q(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (basic_pos_[j] >= 0 || xval_[j] == 0.0) continue;
      add_column(q, j, xval_[j]);
    }
    for (int i = 0; i < m_; ++i) {
      double acc = 0.0;
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) acc += row[k] * q[k];
      xval_[basic_[i]] = -acc;
    }
  }

  void add_column(std::vector<double>& dst, int j, double scale) const {
    if (j < n_) {
      for (const auto& [row, coef] : col_[j]) dst[row] += coef * scale;
    } else {
      dst[j - n_] -= scale;  // slack column is −e_row
    }
  }

  double compute_infeasibility() {
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      double v = xval_[basic_[i]];
      int b = basic_[i];
      if (v < lb_[b] - kFeasTol) total += lb_[b] - v;
      else if (v > ub_[b] + kFeasTol) total += v - ub_[b];
    }
    return total;
  }

  // Reduced costs d_j = c_j − y·A_j with y = Binvᵀ c_B.
  void price(bool phase1) {
    std::vector<double> cb(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      int b = basic_[i];
      if (phase1) {
        double v = xval_[b];
        if (v < lb_[b] - kFeasTol) cb[i] = -1.0;
        else if (v > ub_[b] + kFeasTol) cb[i] = 1.0;
      } else {
        cb[i] = b < n_ ? lp_.objective[b] : 0.0;
      }
    }
    for (int k = 0; k < m_; ++k) {
      double acc = 0.0;
      for (int i = 0; i < m_; ++i)
        acc += cb[i] * binv_[static_cast<size_t>(i) * m_ + k];
      y_[k] = acc;
    }
    for (int j = 0; j < total_; ++j) {
      if (basic_pos_[j] >= 0) {
        d_[j] = 0.0;
        continue;
      }
      double c = phase1 ? 0.0 : (j < n_ ? lp_.objective[j] : 0.0);
      double dot = 0.0;
      if (j < n_) {
        for (const auto& [row, coef] : col_[j]) dot += y_[row] * coef;
      } else {
        dot = -y_[j - n_];
      }
      d_[j] = c - dot;
    }
  }

  // Moves `enter` in direction `dir` (±1) until a basic variable or the
  // entering bound blocks. Returns the step, or NaN when unbounded/stuck.
  double pivot(int enter, int dir, bool phase1) {
    // w = Binv · A_enter.
    std::vector<double> a(m_, 0.0);
    add_column(a, enter, 1.0);
    for (int i = 0; i < m_; ++i) {
      double acc = 0.0;
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) acc += row[k] * a[k];
      w_[i] = acc;
    }

    double limit = kInf;  // entering variable's own range
    if (dir > 0 && std::isfinite(ub_[enter]) && std::isfinite(lb_[enter]))
      limit = ub_[enter] - xval_[enter];
    else if (dir < 0 && std::isfinite(lb_[enter]) && std::isfinite(ub_[enter]))
      limit = xval_[enter] - lb_[enter];
    else if (dir > 0 && std::isfinite(ub_[enter]))
      limit = ub_[enter] - xval_[enter];
    else if (dir < 0 && std::isfinite(lb_[enter]))
      limit = xval_[enter] - lb_[enter];

    int leave = -1;         // row index of blocking basic
    double leave_bound = 0; // value the blocker stops at
    double best = limit;
    for (int i = 0; i < m_; ++i) {
      double rate = -w_[i] * dir;  // d x_B[i] / d step
      if (std::abs(rate) <= kZeroTol) continue;
      int b = basic_[i];
      double v = xval_[b];
      double target;
      if (rate > 0) {  // moving up: blocks at ub, or at lb if below it
        if (v < lb_[b] - kFeasTol) target = lb_[b];
        else if (std::isfinite(ub_[b])) target = ub_[b];
        else continue;
        if (phase1 && v > ub_[b] + kFeasTol) continue;  // worsening tracked by cost
      } else {  // moving down: blocks at lb, or at ub if above it
        if (v > ub_[b] + kFeasTol) target = ub_[b];
        else if (std::isfinite(lb_[b])) target = lb_[b];
        else continue;
        if (phase1 && v < lb_[b] - kFeasTol) continue;
      }
      double ratio = (target - v) / rate;
      if (ratio < -kFeasTol) ratio = 0.0;  // already past: degenerate block
      if (ratio < 0) ratio = 0.0;
      if (ratio < best - kZeroTol || (ratio < best + kZeroTol && leave >= 0 &&
                                      basic_[i] < basic_[leave])) {
        best = ratio;
        leave = i;
        leave_bound = target;
      }
    }

    if (!std::isfinite(best)) return std::nan("");

    double step = best;
    if (leave < 0) {
      // Bound flip: entering runs to its opposite bound.
      xval_[enter] += dir * step;
      for (int i = 0; i < m_; ++i) xval_[basic_[i]] -= w_[i] * dir * step;
      status_[enter] = dir > 0 ? kAtUpper : kAtLower;
      return step;
    }

    // Update values.
    xval_[enter] += dir * step;
    for (int i = 0; i < m_; ++i) xval_[basic_[i]] -= w_[i] * dir * step;
    int out = basic_[leave];
    xval_[out] = leave_bound;  // pin exactly onto its bound

    // Basis exchange + eta update of Binv.
    double piv = w_[leave];
    if (std::abs(piv) < kZeroTol) return std::nan("");
    double* prow = &binv_[static_cast<size_t>(leave) * m_];
    for (int k = 0; k < m_; ++k) prow[k] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      double f = w_[i];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }
    basic_pos_[out] = -1;
    status_[out] = leave_bound == lb_[out] && lb_[out] == ub_[out]
                       ? kAtLower
                       : (leave_bound == ub_[out] ? kAtUpper : kAtLower);
    basic_[leave] = enter;
    basic_pos_[enter] = leave;
    status_[enter] = kBasic;
    return step;
  }

  // Rebuilds Binv from the basic columns by Gauss-Jordan with partial
  // pivoting, then recomputes basic values. Returns false on singularity.
  bool refresh() {
    std::vector<double> mat(static_cast<size_t>(m_) * 2 * m_, 0.0);
    for (int c = 0; c < m_; ++c) {
      std::vector<double> a(m_, 0.0);
      add_column(a, basic_[c], 1.0);
      for (int r = 0; r < m_; ++r) mat[static_cast<size_t>(r) * 2 * m_ + c] = a[r];
    }
    for (int r = 0; r < m_; ++r)
      mat[static_cast<size_t>(r) * 2 * m_ + m_ + r] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      double best = 1e-12;
      for (int r = c; r < m_; ++r) {
        double v = std::abs(mat[static_cast<size_t>(r) * 2 * m_ + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) return false;
      if (piv != c)
        for (int k = 0; k < 2 * m_; ++k)
          std::swap(mat[static_cast<size_t>(piv) * 2 * m_ + k],
                    mat[static_cast<size_t>(c) * 2 * m_ + k]);
      double* crow = &mat[static_cast<size_t>(c) * 2 * m_];
      double inv = 1.0 / crow[c];
      for (int k = 0; k < 2 * m_; ++k) crow[k] *= inv;
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = mat[static_cast<size_t>(r) * 2 * m_ + c];
        if (f == 0.0) continue;
        double* rrow = &mat[static_cast<size_t>(r) * 2 * m_];
        for (int k = 0; k < 2 * m_; ++k) rrow[k] -= f * crow[k];
      }
    }
    for (int r = 0; r < m_; ++r)
      for (int k = 0; k < m_; ++k)
        binv_[static_cast<size_t>(r) * m_ + k] =
            mat[static_cast<size_t>(r) * 2 * m_ + m_ + k];
    recompute_basics();
    return true;
  }

  LpSolution finish(LpSolution& sol, int iters) {
    // Final exact pass: refactor once, recompute, verify feasibility.
    if (!refresh()) {
      sol.status = LpStatus::numerical;
      sol.iterations = iters;
      return sol;
    }
    if (compute_infeasibility() > kFeasTol) {
      // Drift was hiding true infeasibility: resume would be needed; report
      // numerical failure rather than silent garbage.
      sol.status = LpStatus::numerical;
      sol.iterations = iters;
      return sol;
    }
    sol.status = LpStatus::optimal;
    sol.iterations = iters;
    sol.x.assign(n_, 0.0);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) {
      sol.x[j] = xval_[j];
      obj += lp_.objective[j] * sol.x[j];
    }
    sol.objective = obj;
    return sol;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  lp.validate();
  Simplex simplex(lp);
  return simplex.run();
}

}  // namespace gridres
