#pragma once

// Explicit bilinear maps f: R^a x R^b -> R^c and their tensors.

#include <cstdint>
#include <vector>

#include "rankatlas/tensor.hpp"

namespace rankatlas {

/// f(x, y)_k = sum_{i,j} coeff(k, i, j) x_i y_j.
class BilinearMap {
 public:
  BilinearMap() = default;
  /// Zero map.
  BilinearMap(int a, int b, int c);
  /// coeffs indexed (k*a + i)*b + j; throws std::invalid_argument on length mismatch.
  BilinearMap(int a, int b, int c, std::vector<double> coeffs);

  [[nodiscard]] int a() const noexcept { return a_; }
  [[nodiscard]] int b() const noexcept { return b_; }
  [[nodiscard]] int c() const noexcept { return c_; }

  [[nodiscard]] double coeff(int k, int i, int j) const { return coeffs_[index(k, i, j)]; }
  void set_coeff(int k, int i, int j, double value) { coeffs_[index(k, i, j)] = value; }
  [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  [[nodiscard]] Vector operator()(const Vector& x, const Vector& y) const;

  friend bool operator==(const BilinearMap&, const BilinearMap&) = default;

 private:
  [[nodiscard]] std::size_t index(int k, int i, int j) const noexcept {
    return (static_cast<std::size_t>(k) * a_ + i) * b_ + j;
  }

  int a_ = 0;
  int b_ = 0;
  int c_ = 0;
  std::vector<double> coeffs_;
};

/// Cayley-Dickson multiplication on R^d, d in {1, 2, 4, 8}, with
/// (p, q)(r, s) = (pr - conj(s) q, s p + q conj(r)).
BilinearMap hypercomplex_mult(int d);

/// Block convolution of g over m x n blocks: block k of the output is the
/// sum of g(x_i, y_j) over i + j = k.
BilinearMap convolve(const BilinearMap& g, int m, int n);

/// Restriction to the leading a' and b' input coordinates.
BilinearMap restrict_map(const BilinearMap& f, int a_prime, int b_prime);

/// The c x a x b tensor whose slice j is A_j with (A_j)(k, i) = coeff(k, i, j),
/// so f(x, y) = sum_j y_j A_j x.
Tensor3 as_tensor(const BilinearMap& f);
BilinearMap from_tensor(const Tensor3& t);

struct MarginBudget {
  int restarts = 200;
  int iterations = 500;
  std::uint64_t seed = 1;
};

struct MarginEstimate {
  double margin = 0.0;
  int restarts = 0;
  Vector x;
  Vector y;
};

/// Best-found min of ||f(x, y)|| over the product of unit spheres.
/// Throws std::invalid_argument when budget.restarts < 1.
MarginEstimate nonsingularity_margin(const BilinearMap& f, const MarginBudget& budget = {});

}  // namespace rankatlas
