#pragma once

// Pencils M(a, Y) = sum_k a_k Y_k of a u x n x m tensor, their minors and
// the numeric search for real points where M(a, Y) drops rank.

#include <cstdint>
#include <vector>

#include "rankatlas/tensor.hpp"

namespace rankatlas {

/// sum_k a_k Y_k. Throws std::invalid_argument if a.size() != Y.d3().
Matrix contract_pencil(const Vector& a, const Tensor3& y);

/// Determinant of the submatrix on 1-based rows and cols.
double minor(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols);

/// |sum over shuffles I of {1..s} with |I| = t of sgn * [a, c_I] * [c_J, b]|
/// for a u x n matrix, where |a| = k, |b| = n - l + 1, |c| = s and all
/// indices are 1-based. Requires s = n - k + l - 1 > n and t = n - k > 0.
double pluecker_residual(const Matrix& m, const std::vector<int>& a, const std::vector<int>& b,
                         const std::vector<int>& c);

/// Cofactor vector psi with psi_k = (-1)^(n+k) [rows | 1..k^..n] for the
/// n-1 distinct 1-based rows. Entry r of M(a, Y) psi equals [rows, r | 1..n].
Vector kernel_vector_psi(const Vector& a, const Tensor3& y, const std::vector<int>& rows);

struct SearchBudget {
  int restarts = 300;
  int iterations = 200;
  int lines = 20;  // random lines per round in the square case
  double tol_rankdrop = 1e-8;
  double tol_margin = 1e-6;
  std::uint64_t seed = 1;
};

struct AfcrMargin {
  double margin = 0.0;    // best-found min of sigma_n(M(a, Y)) over |a| = 1
  double relative = 0.0;  // margin / ||Y||_F
  bool afcr = false;      // relative > tol_margin
  Vector argmin;
  int restarts_used = 0;
};

/// Throws std::invalid_argument when u < n or budget.restarts < 1.
AfcrMargin afcr_margin(const Tensor3& y, const SearchBudget& budget = {});

struct RankDropPoint {
  Vector a;  // unit vector in R^m
  Vector b;  // unit vector in ker M(a, Y)
  double quality = 0.0;  // sigma_n / sigma_1 at a
};

/// Distinct projective points a with sigma_n(M(a, Y)) / sigma_1 < tol_rankdrop,
/// one entry per kernel basis vector. `seeds` are extra starting points.
/// An empty result means nothing was found, not that nothing exists.
/// Requires u >= n and v = u - n + 1 < m.
std::vector<RankDropPoint> rank_drop_search(const Tensor3& y, const SearchBudget& budget = {},
                                            const std::vector<Vector>& seeds = {});

/// Gauss-Newton refinement of (a, b) toward M(a, Y) b = 0, |a| = |b| = 1.
void polish_rank_drop(const Tensor3& y, Vector& a, Vector& b, int steps = 30);

/// mu_k = [1..n-1, k | 1..n] of M(a, Y) for k = n..u.
Vector corner_minors(const Vector& a, const Tensor3& y);
/// d mu_k / d a_j for the last v = u - n + 1 coordinates of a (v x v).
Matrix corner_minor_jacobian(const Vector& a, const Tensor3& y, const ProblemDims& dims);

struct PointRegularity {
  double corner = 0.0;  // |det| of the leading (n-1) x (n-1) block
  bool jacobian_ok = false;
  Matrix jacobian;
};

PointRegularity point_regularity(const Vector& a, const Tensor3& y, const ProblemDims& dims);

/// min(|a - b|, |a + b|).
double projective_distance(const Vector& a, const Vector& b);

}  // namespace rankatlas
