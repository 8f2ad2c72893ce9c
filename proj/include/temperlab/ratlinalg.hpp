#pragma once

#include <numeric>
#include <optional>
#include <vector>

#include "temperlab/rational.hpp"

namespace temperlab {

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

namespace ratlinalg {

// Row-echelon rank by exact Gaussian elimination. Mutates a copy.
inline int rank(RatMat m) {
  const int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = -1;
    for (int i = r; i < rows; ++i)
      if (!m[i][c].is_zero()) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(m[r], m[pivot]);
    for (int i = r + 1; i < rows; ++i) {
      if (m[i][c].is_zero()) continue;
      Rat f = m[i][c] / m[r][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

inline long long scaled_numerator(const Rat& x, long long l) {
  __int128 p = static_cast<__int128>(x.num()) * (l / x.den());
  if (p > 0x7fffffffffffffffLL || p < -0x7fffffffffffffffLL)
    throw std::overflow_error("canonical_ray: overflow");
  return static_cast<long long>(p);
}

// Canonical ray representative: clear denominators, divide by gcd, make the
// first nonzero coordinate positive. Empty result means the zero vector.
inline std::vector<long long> canonical_ray(const RatVec& v) {
  long long l = 1;
  for (const Rat& x : v) l = std::lcm(l, x.den());
  std::vector<long long> w(v.size());
  long long g = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    w[i] = scaled_numerator(v[i], l);
    g = std::gcd(g, w[i] < 0 ? -w[i] : w[i]);
  }
  if (g == 0) return {};
  int sign = 0;
  for (auto& x : w) {
    x /= g;
    if (sign == 0 && x != 0) sign = x > 0 ? 1 : -1;
  }
  if (sign < 0)
    for (auto& x : w) x = -x;
  return w;
}

// One-dimensional kernel of a stack of covectors in dimension d, when the
// stack has rank exactly d-1; nullopt otherwise.
inline std::optional<RatVec> kernel_ray(RatMat rows, int d) {
  const int nrows = static_cast<int>(rows.size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < d && r < nrows; ++c) {
    int pivot = -1;
    for (int i = r; i < nrows; ++i)
      if (!rows[i][c].is_zero()) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(rows[r], rows[pivot]);
    Rat inv = Rat(1) / rows[r][c];
    for (int j = c; j < d; ++j) rows[r][j] *= inv;
    for (int i = 0; i < nrows; ++i) {
      if (i == r || rows[i][c].is_zero()) continue;
      Rat f = rows[i][c];
      for (int j = c; j < d; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (r != d - 1) return std::nullopt;
  // The single free column determines the kernel vector.
  std::vector<bool> is_pivot(d, false);
  for (int c : pivot_col) is_pivot[c] = true;
  int free_col = -1;
  for (int c = 0; c < d; ++c)
    if (!is_pivot[c]) { free_col = c; break; }
  RatVec v(d, Rat(0));
  v[free_col] = Rat(1);
  for (int i = 0; i < r; ++i) v[pivot_col[i]] = -rows[i][free_col];
  return v;
}

// Exact inverse via Gauss-Jordan; requires a nonsingular square matrix.
inline RatMat inverse(RatMat m) {
  const int n = static_cast<int>(m.size());
  RatMat inv(n, RatVec(n, Rat(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = Rat(1);
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int i = c; i < n; ++i)
      if (!m[i][c].is_zero()) { pivot = i; break; }
    if (pivot < 0) throw std::domain_error("ratlinalg::inverse: singular matrix");
    std::swap(m[c], m[pivot]);
    std::swap(inv[c], inv[pivot]);
    Rat f = Rat(1) / m[c][c];
    for (int j = 0; j < n; ++j) { m[c][j] *= f; inv[c][j] *= f; }
    for (int i = 0; i < n; ++i) {
      if (i == c || m[i][c].is_zero()) continue;
      Rat g = m[i][c];
      for (int j = 0; j < n; ++j) { m[i][j] -= g * m[c][j]; inv[i][j] -= g * inv[c][j]; }
    }
  }
  return inv;
}

inline Rat determinant(RatMat m) {
  const int n = static_cast<int>(m.size());
  Rat det(1);
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int i = c; i < n; ++i)
      if (!m[i][c].is_zero()) { pivot = i; break; }
    if (pivot < 0) return Rat(0);
    if (pivot != c) { std::swap(m[c], m[pivot]); det = -det; }
    det *= m[c][c];
    for (int i = c + 1; i < n; ++i) {
      if (m[i][c].is_zero()) continue;
      Rat f = m[i][c] / m[c][c];
      for (int j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

}  // namespace ratlinalg
}  // namespace temperlab
