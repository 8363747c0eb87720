#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace sponge::lp {

struct Solution {
  bool bounded = true;
  double value = 0;
  std::vector<double> x;
};

/// Dense primal simplex for   max c·x  s.t.  A x <= b, x >= 0  with b >= 0,
/// so the slack basis is feasible and no phase one is needed. Bland's rule
/// keeps it from cycling; problem sizes here are a handful of rows.
inline Solution maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                         const std::vector<double>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  constexpr double eps = 1e-12;
  // Tableau rows 0..m-1 constraints, row m objective (reduced costs negated).
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][n + m] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  Solution sol;
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (T[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == n + m) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      if (T[i][enter] > eps) {
        double ratio = T[i][n + m] / T[i][enter];
        if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave < m && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    if (leave == m) {
      sol.bounded = false;
      return sol;
    }
    double piv = T[leave][enter];
    for (double& v : T[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = T[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[basis[i]] = T[i][n + m];
  sol.value = T[m][n + m];
  return sol;
}

}  // namespace sponge::lp
