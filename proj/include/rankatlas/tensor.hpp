#pragma once

// Dense real 3-way arrays and the integer frame of the rank problem.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rankatlas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A d1 x d2 x d3 real tensor T = (T_1; ...; T_{d3}) stored slice-major:
/// slice k is the d1 x d2 matrix T_k, each slice stored row-major, so
/// entry (i, j, k) lives at data[k*d1*d2 + i*d2 + j] (all indices 0-based).
///
/// Values are immutable once constructed.
class Tensor3 {
 public:
  Tensor3() = default;
  /// Zero tensor.
  Tensor3(int d1, int d2, int d3);
  /// Takes ownership of slice-major data; throws std::invalid_argument if
  /// the length is not d1*d2*d3.
  Tensor3(int d1, int d2, int d3, std::vector<double> data);

  static Tensor3 from_slices(std::span<const Matrix> slices);

  [[nodiscard]] int d1() const noexcept { return d1_; }
  [[nodiscard]] int d2() const noexcept { return d2_; }
  [[nodiscard]] int d3() const noexcept { return d3_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] double operator()(int i, int j, int k) const {
    return data_[index(i, j, k)];
  }

  /// T_k for 0-based k.
  [[nodiscard]] Matrix slice(int k) const;
  [[nodiscard]] std::vector<Matrix> slices() const;

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] double frobenius_norm() const;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  [[nodiscard]] std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(k) * d1_ + i) * d2_ + j;
  }

  int d1_ = 0;
  int d2_ = 0;
  int d3_ = 0;
  std::vector<double> data_;
};

/// Mode-1 flattening (T_1, ..., T_{d3}) of size d1 x (d2*d3), or mode-2
/// stacking of the slices of size (d1*d3) x d2.
Matrix flatten(const Tensor3& t, int mode);

/// Inverse of the mode-1 flattening: splits a d1 x (d2*slices) matrix into
/// `slices` blocks of width d2.
Tensor3 unflatten_mode1(const Matrix& flat, int slices);

/// Inverse of the mode-2 flattening: splits a (d1*slices) x d2 matrix into
/// `slices` blocks of height d1.
Tensor3 unflatten_mode2(const Matrix& flat, int slices);

/// PT = (P T_1; ...; P T_{d3}).
Tensor3 left_multiply(const Matrix& p, const Tensor3& t);

Tensor3 scaled(const Tensor3& t, double factor);

/// The integer frame (m, n, p) of an n x p x m tensor together with
/// u = mn - p, l = (m-1)n - p, v = l + 1 and t = n.
///
/// Construction enforces 3 <= m <= n and (m-1)(n-1)+1 <= p <= (m-1)n,
/// which gives 0 <= l <= m-2, v < m and u = n + l.
class ProblemDims {
 public:
  ProblemDims(int m, int n, int p);

  /// Frame of an n x p x m tensor.
  static ProblemDims of_tensor(const Tensor3& t) { return {t.d3(), t.d1(), t.d2()}; }
  /// True if (m, n, p) satisfies the construction invariants.
  static bool valid(int m, int n, int p) noexcept;

  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int p() const noexcept { return p_; }
  [[nodiscard]] int u() const noexcept { return m_ * n_ - p_; }
  [[nodiscard]] int l() const noexcept { return (m_ - 1) * n_ - p_; }
  [[nodiscard]] int v() const noexcept { return l() + 1; }
  [[nodiscard]] int t() const noexcept { return n_; }

  friend bool operator==(const ProblemDims&, const ProblemDims&) = default;

 private:
  int m_;
  int n_;
  int p_;
};

}  // namespace rankatlas
