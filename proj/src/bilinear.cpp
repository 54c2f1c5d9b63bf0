#include "rankatlas/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rankatlas/parallel.hpp"

namespace rankatlas {

BilinearMap::BilinearMap(int a, int b, int c) : BilinearMap(a, b, c, {}) {}

BilinearMap::BilinearMap(int a, int b, int c, std::vector<double> coeffs)
    : a_(a), b_(b), c_(c), coeffs_(std::move(coeffs)) {
  if (a <= 0 || b <= 0 || c <= 0) throw std::invalid_argument("BilinearMap: dimensions must be positive");
  const auto expected = static_cast<std::size_t>(a) * b * c;
  if (coeffs_.empty()) {
    coeffs_.assign(expected, 0.0);
  } else if (coeffs_.size() != expected) {
    throw std::invalid_argument("BilinearMap: coeffs length " + std::to_string(coeffs_.size()) +
                                " does not match c*a*b = " + std::to_string(expected));
  }
}

Vector BilinearMap::operator()(const Vector& x, const Vector& y) const {
  if (x.size() != a_ || y.size() != b_) throw std::invalid_argument("BilinearMap: argument size mismatch");
  Vector out = Vector::Zero(c_);
  for (int k = 0; k < c_; ++k)
    for (int i = 0; i < a_; ++i)
      for (int j = 0; j < b_; ++j) out(k) += coeff(k, i, j) * x(i) * y(j);
  return out;
}

namespace {

Vector conj(const Vector& x) {
  Vector out = -x;
  out(0) = x(0);
  return out;
}

Vector cd_product(const Vector& x, const Vector& y) {
  const auto d = x.size();
  if (d == 1) return x.cwiseProduct(y);
  const auto h = d / 2;
  const Vector p = x.head(h), q = x.tail(h), r = y.head(h), s = y.tail(h);
  Vector out(d);
  out.head(h) = cd_product(p, r) - cd_product(conj(s), q);
  out.tail(h) = cd_product(s, p) + cd_product(q, conj(r));
  return out;
}

}  // namespace

BilinearMap hypercomplex_mult(int d) {
  if (d != 1 && d != 2 && d != 4 && d != 8) {
    throw std::invalid_argument("hypercomplex_mult: d must be 1, 2, 4 or 8, got " + std::to_string(d));
  }
  BilinearMap f(d, d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Vector prod = cd_product(Vector::Unit(d, i), Vector::Unit(d, j));
      for (int k = 0; k < d; ++k) f.set_coeff(k, i, j, prod(k));
    }
  }
  return f;
}

BilinearMap convolve(const BilinearMap& g, int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("convolve: block counts must be positive");
  const int u = g.a(), v = g.b(), w = g.c();
  BilinearMap f(m * u, n * v, (m + n - 1) * w);
  for (int bi = 0; bi < m; ++bi)
    for (int bj = 0; bj < n; ++bj)
      for (int k = 0; k < w; ++k)
        for (int i = 0; i < u; ++i)
          for (int j = 0; j < v; ++j)
            f.set_coeff((bi + bj) * w + k, bi * u + i, bj * v + j, g.coeff(k, i, j));
  return f;
}

BilinearMap restrict_map(const BilinearMap& f, int a_prime, int b_prime) {
  if (a_prime < 1 || a_prime > f.a() || b_prime < 1 || b_prime > f.b()) {
    throw std::invalid_argument("restrict_map: need 1 <= a' <= a and 1 <= b' <= b");
  }
  BilinearMap out(a_prime, b_prime, f.c());
  for (int k = 0; k < f.c(); ++k)
    for (int i = 0; i < a_prime; ++i)
      for (int j = 0; j < b_prime; ++j) out.set_coeff(k, i, j, f.coeff(k, i, j));
  return out;
}

Tensor3 as_tensor(const BilinearMap& f) {
  std::vector<double> data;
  data.reserve(f.coeffs().size());
  for (int j = 0; j < f.b(); ++j)
    for (int k = 0; k < f.c(); ++k)
      for (int i = 0; i < f.a(); ++i) data.push_back(f.coeff(k, i, j));
  return {f.c(), f.a(), f.b(), std::move(data)};
}

BilinearMap from_tensor(const Tensor3& t) {
  BilinearMap f(t.d2(), t.d3(), t.d1());
  for (int j = 0; j < t.d3(); ++j)
    for (int k = 0; k < t.d1(); ++k)
      for (int i = 0; i < t.d2(); ++i) f.set_coeff(k, i, j, t(k, i, j));
  return f;
}

namespace {

// B(y) = sum_j y_j A_j, so f(x, y) = B(y) x.
Matrix left_operator(const BilinearMap& f, const Vector& y) {
  Matrix out = Matrix::Zero(f.c(), f.a());
  for (int k = 0; k < f.c(); ++k)
    for (int i = 0; i < f.a(); ++i)
      for (int j = 0; j < f.b(); ++j) out(k, i) += f.coeff(k, i, j) * y(j);
  return out;
}

// C(x) with f(x, y) = C(x) y.
Matrix right_operator(const BilinearMap& f, const Vector& x) {
  Matrix out = Matrix::Zero(f.c(), f.b());
  for (int k = 0; k < f.c(); ++k)
    for (int i = 0; i < f.a(); ++i)
      for (int j = 0; j < f.b(); ++j) out(k, j) += f.coeff(k, i, j) * x(i);
  return out;
}

struct LocalResult {
  double value = std::numeric_limits<double>::infinity();
  Vector x, y;
};

LocalResult descend(const BilinearMap& f, Vector x, Vector y, int iterations) {
  auto objective = [&](const Vector& xx, const Vector& yy) { return f(xx, yy).squaredNorm(); };
  double value = objective(x, y);
  double step = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector fx = f(x, y);
    Vector gx = 2.0 * left_operator(f, y).transpose() * fx;
    Vector gy = 2.0 * right_operator(f, x).transpose() * fx;
    gx -= gx.dot(x) * x;
    gy -= gy.dot(y) * y;
    const double g2 = gx.squaredNorm() + gy.squaredNorm();
    if (g2 < 1e-30) break;
    step = std::min(step * 2.0, 1.0);
    bool accepted = false;
    while (step > 1e-16) {
      Vector xn = x - step * gx;
      Vector yn = y - step * gy;
      xn.normalize();
      yn.normalize();
      const double trial = objective(xn, yn);
      if (trial <= value - 1e-4 * step * g2) {
        x = std::move(xn);
        y = std::move(yn);
        value = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {value, std::move(x), std::move(y)};
}

}  // namespace

MarginEstimate nonsingularity_margin(const BilinearMap& f, const MarginBudget& budget) {
  if (budget.restarts < 1) throw std::invalid_argument("nonsingularity_margin: restarts must be >= 1");
  std::vector<LocalResult> results(budget.restarts);
  parallel_for(results.size(), [&](std::size_t r) {
    Rng rng(derive_seed(budget.seed, r));
    Vector x = random_unit(rng, f.a());
    Vector y = random_unit(rng, f.b());
    results[r] = descend(f, std::move(x), std::move(y), budget.iterations);
  });
  const auto best = std::min_element(results.begin(), results.end(),
                                     [](const auto& l, const auto& r) { return l.value < r.value; });
  return {std::sqrt(std::max(best->value, 0.0)), budget.restarts, best->x, best->y};
}

}  // namespace rankatlas
