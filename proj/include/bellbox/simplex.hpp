#pragma once

#include <vector>

namespace bellbox {

/// maximize c.x  subject to  A x = b, x >= 0.
/// Rows may be linearly dependent; redundant rows are detected and dropped
/// during phase 1.
struct LinearProgram {
  std::vector<std::vector<double>> a;  // m rows of n coefficients
  std::vector<double> b;               // m right-hand sides
  std::vector<double> c;               // n objective coefficients
};

struct LpSolution {
  std::vector<double> x;
  double value = 0.0;
  long long iterations = 0;
};

/// Dense two-phase simplex with Bland's rule (anti-cycling).
/// Throws std::runtime_error on infeasibility or an unbounded objective.
LpSolution solve_simplex(const LinearProgram& lp);

}  // namespace bellbox
