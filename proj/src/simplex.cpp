#include "bellbox/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace bellbox {

namespace {

constexpr double kEps = 1e-10;

struct Tableau {
  // columns: n structural + m artificial; one objective row at the end
  std::size_t m, n;
  std::vector<std::vector<double>> rows;  // m rows of n+m coefficients
  std::vector<double> rhs;                // m entries
  std::vector<std::size_t> basis;         // basic column per row
  long long pivots = 0;

  void pivot(std::size_t r, std::size_t col) {
    const double piv = rows[r][col];
    for (auto& v : rows[r]) v /= piv;
    rhs[r] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = rows[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < rows[i].size(); ++j) rows[i][j] -= f * rows[r][j];
      rhs[i] -= f * rhs[r];
    }
    basis[r] = col;
    ++pivots;
  }

  // Bland's rule: entering = lowest-index improving column; leaving =
  // lowest-basis-index among minimum-ratio rows. Guarantees termination on
  // the degenerate vertices of this polytope.
  bool iterate(const std::vector<double>& cost, std::size_t usable_cols) {
    while (true) {
      std::vector<double> dual(m);
      for (std::size_t i = 0; i < m; ++i) dual[i] = cost[basis[i]];

      std::size_t enter = usable_cols;
      for (std::size_t j = 0; j < usable_cols; ++j) {
        double reduced = cost[j];
        for (std::size_t i = 0; i < m; ++i) reduced -= dual[i] * rows[i][j];
        if (reduced > kEps) { enter = j; break; }
      }
      if (enter == usable_cols) return true;  // optimal

      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (rows[i][enter] > kEps) {
          const double ratio = rhs[i] / rows[i][enter];
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && (leave == m || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;  // unbounded
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpSolution solve_simplex(const LinearProgram& lp) {
  const std::size_t m = lp.a.size();
  const std::size_t n = lp.c.size();
  if (lp.b.size() != m) throw std::invalid_argument("b size mismatch");
  for (const auto& row : lp.a)
    if (row.size() != n) throw std::invalid_argument("A row size mismatch");

  Tableau t;
  t.m = m;
  t.n = n;
  t.rows.assign(m, std::vector<double>(n + m, 0.0));
  t.rhs = lp.b;
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = lp.a[i][j];
    if (t.rhs[i] < 0.0) {
      for (auto& v : t.rows[i]) v = -v;
      t.rhs[i] = -t.rhs[i];
    }
    t.rows[i][n + i] = 1.0;
    t.basis[i] = n + i;
  }

  // Phase 1: drive the artificial variables to zero.
  std::vector<double> phase1(n + m, 0.0);
  for (std::size_t j = n; j < n + m; ++j) phase1[j] = -1.0;
  if (!t.iterate(phase1, n + m)) throw std::runtime_error("phase 1 unbounded");
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis[i] >= n) infeas += t.rhs[i];
  if (infeas > 1e-7) throw std::runtime_error("linear program infeasible");

  // Pivot residual artificials out; rows that cannot pivot are redundant.
  for (std::size_t i = 0; i < t.m;) {
    if (t.basis[i] < n) { ++i; continue; }
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (std::fabs(t.rows[i][j]) > kEps) { col = j; break; }
    if (col < n) {
      t.pivot(i, col);
      ++i;
    } else {
      t.rows.erase(t.rows.begin() + i);
      t.rhs.erase(t.rhs.begin() + i);
      t.basis.erase(t.basis.begin() + i);
      --t.m;
    }
  }

  // Phase 2: entering restricted to the structural columns.
  std::vector<double> cost(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
  if (!t.iterate(cost, n)) throw std::runtime_error("objective unbounded");

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < t.m; ++i)
    if (t.basis[i] < n) sol.x[t.basis[i]] = t.rhs[i];
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.value += lp.c[j] * sol.x[j];
  sol.iterations = t.pivots;
  return sol;
}

}  // namespace bellbox
