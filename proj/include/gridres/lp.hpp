#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridres/common.hpp"

namespace gridres {

enum class LpStatus {
  optimal,
  infeasible,
  unbounded,
  iteration_limit,  // surfaced, never silent garbage
  numerical,        // singular basis / failed feasibility re-check
};

std::string to_string(LpStatus s);

// min c·x  s.t.  lo_i <= a_i·x <= hi_i,  lb_j <= x_j <= ub_j.
// Ranged rows express equalities (lo == hi) and one-sided rows (±kInf).
struct LinearProgram {
  struct Row {
    double lo = -kInf;
    double hi = kInf;
    std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  };

  int num_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<Row> rows;
  std::vector<std::string> var_names;  // diagnostics only
  // Optional nonbasic start per variable: -1 lower bound, +1 upper bound,
  // 0 default (bound nearest zero; free variables start at 0). A good hint
  // shortens phase 1 but never changes the optimum.
  std::vector<int8_t> start_hint;

  int add_var(double lb, double ub, double obj, std::string name = {});
  void add_row(double lo, double hi,
               std::vector<std::pair<int, double>> terms);
  void validate() const;  // InputError on inconsistent dimensions / NaN
};

struct LpSolution {
  LpStatus status = LpStatus::numerical;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

// Bounded-variable primal simplex (dense basis inverse, composite phase 1,
// Dantzig pricing with Bland fallback on degenerate stalls, lowest-index tie
// breaking). Deterministic for identical input.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace gridres
