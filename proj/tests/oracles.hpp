#pragma once

// Independent reference implementations used only by the tests.

#include <cstdint>
#include <vector>

#include "rankatlas/tensor.hpp"

namespace oracle {

inline int popcount_loop(std::int64_t n) {
  int c = 0;
  for (; n > 0; n /= 2) c += static_cast<int>(n % 2);
  return c;
}

inline int bit(std::int64_t x, int j) { return static_cast<int>((x >> j) & 1); }

// Literal count over bit positions j = 0..62.
inline int tau_scan(std::int64_t k, std::int64_t h) {
  int c = 0;
  for (int j = 0; j < 63; ++j)
    if (bit(k - h, j) == 0 && bit(k, j) != bit(h, j)) ++c;
  return c;
}

// Odd part and 2-adic valuation by repeated division.
inline std::int64_t rho_by_division(std::int64_t n) {
  int e = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++e;
  }
  const int c = e / 4, b = e % 4;
  std::int64_t pow = 1;
  for (int i = 0; i < b; ++i) pow *= 2;
  return pow + 8 * c;
}

// Rows of Pascal's triangle mod 2.
inline std::vector<std::vector<int>> pascal_parity(int rows) {
  std::vector<std::vector<int>> t(rows + 1);
  for (int n = 0; n <= rows; ++n) {
    t[n].assign(n + 1, 1);
    for (int k = 1; k < n; ++k) t[n][k] = (t[n - 1][k - 1] + t[n - 1][k]) % 2;
  }
  return t;
}

inline bool stiefel_hopf_pascal(const std::vector<std::vector<int>>& parity, int r, int s, int n) {
  for (int k = n - s + 1; k < r; ++k) {
    if (k < 0 || k > n) continue;
    if (parity[n][k] == 1) return false;
  }
  return true;
}

// Laplace expansion along the first row.
template <class T>
T laplace_det(const std::vector<std::vector<T>>& a) {
  const auto n = a.size();
  if (n == 0) return T(1);
  if (n == 1) return a[0][0];
  T sum = T(0);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<T>> sub;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<T> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(a[r][j]);
      sub.push_back(row);
    }
    const T term = a[0][c] * laplace_det(sub);
    sum += (c % 2 ? -term : term);
  }
  return sum;
}

// [rows | 1..n] of an integer matrix, 1-based rows.
inline long long int_minor(const std::vector<std::vector<long long>>& m, const std::vector<int>& rows) {
  std::vector<std::vector<long long>> sub;
  for (int r : rows) sub.push_back(m[r - 1]);
  return laplace_det(sub);
}

// Signed Pluecker sum in exact integer arithmetic.
inline long long pluecker_exact(const std::vector<std::vector<long long>>& m, const std::vector<int>& a,
                                const std::vector<int>& b, const std::vector<int>& c, int t) {
  const int s = static_cast<int>(c.size());
  long long sum = 0;
  for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
    if (popcount_loop(mask) != t) continue;
    std::vector<int> left = a, right;
    int parity = 0, r = 0;
    for (int i = 0; i < s; ++i) {
      if (mask >> i & 1u) {
        left.push_back(c[i]);
        parity += i - r;
        ++r;
      } else {
        right.push_back(c[i]);
      }
    }
    right.insert(right.end(), b.begin(), b.end());
    const long long term = int_minor(m, left) * int_minor(m, right);
    sum += parity % 2 ? -term : term;
  }
  return sum;
}

// Central difference of a vector-valued function in coordinate j.
template <class F>
rankatlas::Vector central_difference(F f, rankatlas::Vector x, int j, double h) {
  rankatlas::Vector xp = x, xm = x;
  xp(j) += h;
  xm(j) -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

}  // namespace oracle
