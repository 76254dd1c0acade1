#pragma once

#include <string>
#include <vector>

namespace gridres {

// Verification kernels for the closed-form value-selection objective. The
// production path picks actions by explicit enumeration; these kernels prove
// the algebraic forms select identically (see tests).

// Evaluates sum_{i'} prod_l (1 - beta_l - b(i',l)) * (1 - 2*b(i',l)) * V_{i'}.
// b_matrix rows must enumerate all 2^m binary m-vectors uniquely. For a binary
// beta this is exactly the table lookup V at beta's row.
double multilinear_value(const std::vector<int>& beta,
                         const std::vector<std::vector<int>>& b_matrix,
                         const std::vector<double>& values);

// Chained McCormick linearization of the product y_m = prod_l beta_l:
// y_2 = beta_1*beta_2, y_l = y_{l-1}*beta_l, each product replaced by its
// four-inequality envelope (exact at binary points).
struct McCormickReport {
  std::vector<double> y;            // y[0] unused, y[1] = beta_1, y[2..m]
  double product = 0.0;             // prod beta_l
  double max_residual = 0.0;        // most violated envelope inequality
  bool feasible = false;            // all inequalities hold within 1e-12
  std::vector<std::string> violations;
};

McCormickReport mccormick_chain(const std::vector<int>& beta);

}  // namespace gridres
