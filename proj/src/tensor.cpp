#include "rankatlas/tensor.hpp"

#include <cmath>
#include <string>

namespace rankatlas {

Tensor3::Tensor3(int d1, int d2, int d3) : Tensor3(d1, d2, d3, {}) {}

Tensor3::Tensor3(int d1, int d2, int d3, std::vector<double> data)
    : d1_(d1), d2_(d2), d3_(d3), data_(std::move(data)) {
  if (d1 <= 0 || d2 <= 0 || d3 <= 0) {
    throw std::invalid_argument("Tensor3: dimensions must be positive");
  }
  const auto expected = static_cast<std::size_t>(d1) * d2 * d3;
  if (data_.empty()) {
    data_.assign(expected, 0.0);
  } else if (data_.size() != expected) {
    throw std::invalid_argument("Tensor3: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(d1) + "x" +
                                std::to_string(d2) + "x" + std::to_string(d3));
  }
}

Tensor3 Tensor3::from_slices(std::span<const Matrix> slices) {
  if (slices.empty()) throw std::invalid_argument("Tensor3::from_slices: no slices");
  const auto rows = static_cast<int>(slices.front().rows());
  const auto cols = static_cast<int>(slices.front().cols());
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(rows) * cols * slices.size());
  for (const auto& s : slices) {
    if (s.rows() != rows || s.cols() != cols) {
      throw std::invalid_argument("Tensor3::from_slices: ragged slices");
    }
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) data.push_back(s(i, j));
  }
  return {rows, cols, static_cast<int>(slices.size()), std::move(data)};
}

Matrix Tensor3::slice(int k) const {
  if (k < 0 || k >= d3_) throw std::out_of_range("Tensor3::slice: index out of range");
  Matrix s(d1_, d2_);
  for (int i = 0; i < d1_; ++i)
    for (int j = 0; j < d2_; ++j) s(i, j) = (*this)(i, j, k);
  return s;
}

std::vector<Matrix> Tensor3::slices() const {
  std::vector<Matrix> out;
  out.reserve(d3_);
  for (int k = 0; k < d3_; ++k) out.push_back(slice(k));
  return out;
}

double Tensor3::frobenius_norm() const {
  double acc = 0.0;
  for (double x : data_) acc += x * x;
  return std::sqrt(acc);
}

Matrix flatten(const Tensor3& t, int mode) {
  const int d1 = t.d1(), d2 = t.d2(), d3 = t.d3();
  if (mode == 1) {
    Matrix out(d1, d2 * d3);
    for (int k = 0; k < d3; ++k) out.block(0, k * d2, d1, d2) = t.slice(k);
    return out;
  }
  if (mode == 2) {
    Matrix out(d1 * d3, d2);
    for (int k = 0; k < d3; ++k) out.block(k * d1, 0, d1, d2) = t.slice(k);
    return out;
  }
  throw std::invalid_argument("flatten: mode must be 1 or 2");
}

Tensor3 unflatten_mode1(const Matrix& flat, int slices) {
  if (slices <= 0 || flat.cols() % slices != 0) {
    throw std::invalid_argument("unflatten_mode1: column count not divisible by slice count");
  }
  const auto width = static_cast<int>(flat.cols() / slices);
  std::vector<Matrix> parts;
  parts.reserve(slices);
  for (int k = 0; k < slices; ++k) parts.emplace_back(flat.block(0, k * width, flat.rows(), width));
  return Tensor3::from_slices(parts);
}

Tensor3 unflatten_mode2(const Matrix& flat, int slices) {
  if (slices <= 0 || flat.rows() % slices != 0) {
    throw std::invalid_argument("unflatten_mode2: row count not divisible by slice count");
  }
  const auto height = static_cast<int>(flat.rows() / slices);
  std::vector<Matrix> parts;
  parts.reserve(slices);
  for (int k = 0; k < slices; ++k) parts.emplace_back(flat.block(k * height, 0, height, flat.cols()));
  return Tensor3::from_slices(parts);
}

Tensor3 left_multiply(const Matrix& p, const Tensor3& t) {
  if (p.cols() != t.d1()) throw std::invalid_argument("left_multiply: dimension mismatch");
  std::vector<Matrix> parts;
  parts.reserve(t.d3());
  for (int k = 0; k < t.d3(); ++k) parts.emplace_back(p * t.slice(k));
  return Tensor3::from_slices(parts);
}

Tensor3 scaled(const Tensor3& t, double factor) {
  std::vector<double> data(t.data().begin(), t.data().end());
  for (double& x : data) x *= factor;
  return {t.d1(), t.d2(), t.d3(), std::move(data)};
}

bool ProblemDims::valid(int m, int n, int p) noexcept {
  return m >= 3 && m <= n && p >= (m - 1) * (n - 1) + 1 && p <= (m - 1) * n;
}

ProblemDims::ProblemDims(int m, int n, int p) : m_(m), n_(n), p_(p) {
  if (!valid(m, n, p)) {
    throw std::invalid_argument("ProblemDims: need 3 <= m <= n and (m-1)(n-1)+1 <= p <= (m-1)n, got (" +
                                std::to_string(m) + "," + std::to_string(n) + "," +
                                std::to_string(p) + ")");
  }
}

}  // namespace rankatlas
