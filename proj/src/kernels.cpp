#include "gridres/kernels.hpp"

#include <algorithm>
#include <set>

#include "gridres/common.hpp"

namespace gridres {

double multilinear_value(const std::vector<int>& beta,
                         const std::vector<std::vector<int>>& b_matrix,
                         const std::vector<double>& values) {
  const size_t m = beta.size();
  input_check(m >= 1 && m <= 20, "multilinear_value: need 1..20 switches");
  for (int v : beta)
    input_check(v == 0 || v == 1, "multilinear_value: beta must be binary");
  const size_t rows = size_t{1} << m;
  input_check(b_matrix.size() == rows,
              "multilinear_value: b_matrix must enumerate all binary vectors");
  input_check(values.size() == rows,
              "multilinear_value: one value per b_matrix row");
  std::set<std::vector<int>> seen;
  for (const auto& row : b_matrix) {
    input_check(row.size() == m, "multilinear_value: b_matrix row width != m");
    for (int v : row)
      input_check(v == 0 || v == 1, "multilinear_value: b_matrix must be binary");
    input_check(seen.insert(row).second,
                "multilinear_value: duplicate b_matrix row");
  }

  double total = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    double prod = 1.0;
    for (size_t l = 0; l < m; ++l) {
      int b = b_matrix[i][l];
      prod *= static_cast<double>((1 - beta[l] - b) * (1 - 2 * b));
    }
    total += prod * values[i];
  }
  return total;
}

McCormickReport mccormick_chain(const std::vector<int>& beta) {
  const size_t m = beta.size();
  input_check(m >= 1, "mccormick_chain: empty beta");
  for (int v : beta)
    input_check(v == 0 || v == 1, "mccormick_chain: beta must be binary");

  McCormickReport rep;
  rep.y.assign(m + 1, 0.0);
  rep.y[1] = static_cast<double>(beta[0]);
  rep.product = rep.y[1];
  rep.max_residual = 0.0;

  auto note = [&rep](double residual, const std::string& label) {
    rep.max_residual = std::max(rep.max_residual, residual);
    if (residual > 1e-12) rep.violations.push_back(label);
  };

  for (size_t l = 2; l <= m; ++l) {
    double x = rep.y[l - 1];                       // running product
    double b = static_cast<double>(beta[l - 1]);   // next factor
    double yl = x * b;
    rep.y[l] = yl;
    rep.product = yl;
    const std::string tag = "y" + std::to_string(l);
    // Envelope of yl = x*b over the unit square, exact at binary corners.
    note(-yl, tag + " >= 0");
    note(x + b - 1.0 - yl, tag + " >= y" + std::to_string(l - 1) + " + beta - 1");
    note(yl - x, tag + " <= y" + std::to_string(l - 1));
    note(yl - b, tag + " <= beta" + std::to_string(l));
  }
  rep.feasible = rep.max_residual <= 1e-12;
  return rep;
}

}  // namespace gridres
