#include "exact_lp.hpp"

#include <algorithm>

namespace scmkit::detail {

bool in_convex_hull(const std::vector<std::vector<Rational>>& points, const std::vector<Rational>& p) {
  if (points.empty()) return false;
  for (const auto& q : points)
    if (q == p) return true;
  const std::size_t dims = p.size(), k = points.size();
  // Rows: one per coordinate plus sum(lambda) = 1. Columns: lambda, then one
  // artificial per row, then the right-hand side.
  const std::size_t rows = dims + 1, cols = k + rows + 1, rhs = cols - 1;
  std::vector<std::vector<Rational>> t(rows, std::vector<Rational>(cols, 0));
  for (std::size_t i = 0; i < dims; ++i) {
    for (std::size_t c = 0; c < k; ++c) t[i][c] = points[c][i];
    t[i][rhs] = p[i];
  }
  for (std::size_t c = 0; c < k; ++c) t[dims][c] = 1;
  t[dims][rhs] = 1;
  for (std::size_t i = 0; i < rows; ++i) {
    if (t[i][rhs] < 0)
      for (auto& v : t[i]) v = -v;
    t[i][k + i] = 1;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = k + i;
  // Reduced costs of the phase-one objective (sum of artificials).
  std::vector<Rational> z(cols, 0);
  for (std::size_t c = 0; c < cols; ++c) {
    if (c >= k && c < rhs) continue;
    for (std::size_t i = 0; i < rows; ++i) z[c] -= t[i][c];
  }
  while (true) {
    std::size_t enter = cols;
    for (std::size_t c = 0; c < rhs; ++c)
      if (z[c] < 0) {
        enter = c;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = rows;
    Rational best;
    for (std::size_t i = 0; i < rows; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][rhs] / t[i][enter];
      if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == rows) break;  // unbounded cannot happen in phase one
    Rational piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rational f = t[i][enter];
      for (std::size_t c = 0; c < cols; ++c) t[i][c] -= f * t[leave][c];
    }
    if (z[enter] != 0) {
      Rational f = z[enter];
      for (std::size_t c = 0; c < cols; ++c) z[c] -= f * t[leave][c];
    }
    basis[leave] = enter;
  }
  return z[rhs] == 0;
}

}  // namespace scmkit::detail
