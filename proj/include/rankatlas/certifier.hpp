#pragma once

// Normal-form maps sigma, iota, nu, phi and the rank-p decision for an
// n x p x m tensor T = (T_1; ...; T_m).

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rankatlas/pencil.hpp"
#include "rankatlas/tensor.hpp"

namespace rankatlas {

/// The leading p x p block of fl_2(T) is singular (condition number >= 1e12).
class NotInV : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (last u rows of fl_2(T)) * (first p rows of fl_2(T))^-1, a u x p matrix.
Matrix sigma(const Tensor3& t);

/// (A, -E_u).
Matrix iota(const Matrix& a);
/// iota(A) split into m column blocks, giving a u x n x m tensor W.
Tensor3 iota_tensor(const Matrix& a, int m);

/// -(last u columns of fl_1(Y))^-1 (first p columns of fl_1(Y)).
/// Throws std::domain_error when the trailing block is singular.
Matrix nu(const Tensor3& y);

/// (a_1 b; ...; a_{m-2} b; a_{m-1} b^{<= n-l}) in R^p.
Vector phi(const Vector& a, const Vector& b, const ProblemDims& dims);

/// Numerical rank (relative threshold 1e-8) of the columns phi(d_j, b_j).
int span_dimension_U(const std::vector<RankDropPoint>& points, const ProblemDims& dims);

struct RankCertificate {
  ProblemDims dims{3, 3, 5};
  std::vector<std::pair<Vector, Vector>> points;  // (d_j, a_j)
  Matrix A;               // n x p, column j is a_j
  std::vector<Matrix> D;  // m diagonal p x p matrices, D_k(j, j) = (d_j)_k
  Matrix N;               // p x p, column j is phi(d_j, a_j)
  Matrix Q;               // N^-1
  double cond_N = 0.0;
  double equation_residual = 0.0;  // max_j |M(d_j, W) a_j|
  double residual = 0.0;           // |T - T^|_F / |T|_F
};

struct CpFactors {
  Matrix A;  // n x p
  Matrix B;  // p x p
  Matrix C;  // m x p
  double residual = 0.0;
};

/// T^ = sum_j A_j (x) B_j (x) C_j, i.e. T^_k = A diag(C(k, :)) B^T.
Tensor3 cp_reconstruct(const CpFactors& f);

/// Factors with T^_k = A D_k Q N0, where N0 is the leading p x p block of fl_2(T).
CpFactors decompose(const Tensor3& t, const RankCertificate& cert);

enum class Verdict { kRankP, kRankExceedsP, kInconclusive };
std::string_view to_string(Verdict v);

struct CertifyBudget {
  SearchBudget search;
  int rounds = 3;
  double cond_limit = 1e10;
  double residual_tol = 1e-6;
};

struct CertifyResult {
  Verdict verdict = Verdict::kInconclusive;
  std::optional<RankCertificate> certificate;
  AfcrMargin margin;
  int points_found = 0;
  int span_dim = 0;
  std::string diagnostics;
};

/// Throws NotInV when T is outside V and std::invalid_argument for invalid
/// dims or budgets.
CertifyResult certify(const Tensor3& t, const CertifyBudget& budget = {});

}  // namespace rankatlas
