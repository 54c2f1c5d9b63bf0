#include "rankatlas/pencil.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "rankatlas/parallel.hpp"

namespace rankatlas {

Matrix contract_pencil(const Vector& a, const Tensor3& y) {
  if (a.size() != y.d3()) {
    throw std::invalid_argument("contract_pencil: vector length " + std::to_string(a.size()) +
                                " does not match " + std::to_string(y.d3()) + " slices");
  }
  Matrix out = Matrix::Zero(y.d1(), y.d2());
  for (int k = 0; k < y.d3(); ++k)
    for (int i = 0; i < y.d1(); ++i)
      for (int j = 0; j < y.d2(); ++j) out(i, j) += a(k) * y(i, j, k);
  return out;
}

namespace {

Matrix select(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const int i = rows[r] - 1, j = cols[c] - 1;
      if (i < 0 || i >= m.rows() || j < 0 || j >= m.cols()) {
        throw std::out_of_range("minor: index out of range");
      }
      out(r, c) = m(i, j);
    }
  }
  return out;
}

double det(const Matrix& s) {
  if (s.rows() == 0) return 1.0;
  return s.fullPivLu().determinant();
}

// Cofactor matrix C with C(r, c) = (-1)^(r+c) det(S without row r, col c).
Matrix cofactors(const Matrix& s) {
  const auto n = s.rows();
  Matrix out(n, n);
  if (n == 1) {
    out(0, 0) = 1.0;
    return out;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      Matrix sub(n - 1, n - 1);
      for (Eigen::Index i = 0, ii = 0; i < n; ++i) {
        if (i == r) continue;
        for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
          if (j == c) continue;
          sub(ii, jj++) = s(i, j);
        }
        ++ii;
      }
      out(r, c) = ((r + c) % 2 ? -1.0 : 1.0) * det(sub);
    }
  }
  return out;
}

std::vector<int> iota_from(int first, int last) {
  std::vector<int> out;
  for (int i = first; i <= last; ++i) out.push_back(i);
  return out;
}

}  // namespace

double minor(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.size() != cols.size()) throw std::invalid_argument("minor: ragged index lists");
  return det(select(m, rows, cols));
}

double pluecker_residual(const Matrix& m, const std::vector<int>& a, const std::vector<int>& b,
                         const std::vector<int>& c) {
  const int n = static_cast<int>(m.cols());
  if (m.rows() < n) throw std::invalid_argument("pluecker_residual: need u >= n");
  const int k = static_cast<int>(a.size());
  const int l = n + 1 - static_cast<int>(b.size());
  const int s = static_cast<int>(c.size());
  const int t = n - k;
  if (s != n - k + l - 1 || s <= n || t <= 0) {
    throw std::invalid_argument("pluecker_residual: need |c| = n-k+l-1 > n and n-k > 0");
  }
  const auto cols = iota_from(1, n);
  double sum = 0.0;
  // Walk all t-subsets I of {0..s-1} via bitmasks.
  for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
    if (std::popcount(mask) != t) continue;
    std::vector<int> left = a, right;
    int parity = 0, rank = 0;
    for (int i = 0; i < s; ++i) {
      if (mask & (1u << i)) {
        left.push_back(c[i]);
        parity += i - rank;
        ++rank;
      } else {
        right.push_back(c[i]);
      }
    }
    right.insert(right.end(), b.begin(), b.end());
    const double sign = parity % 2 ? -1.0 : 1.0;
    sum += sign * minor(m, left, cols) * minor(m, right, cols);
  }
  return std::abs(sum);
}

Vector kernel_vector_psi(const Vector& a, const Tensor3& y, const std::vector<int>& rows) {
  const int n = y.d2();
  if (static_cast<int>(rows.size()) != n - 1) {
    throw std::invalid_argument("kernel_vector_psi: need exactly n-1 rows");
  }
  if (std::set<int>(rows.begin(), rows.end()).size() != rows.size()) {
    throw std::invalid_argument("kernel_vector_psi: repeated row index");
  }
  const Matrix m = contract_pencil(a, y);
  Vector psi(n);
  for (int k = 1; k <= n; ++k) {
    std::vector<int> cols;
    for (int j = 1; j <= n; ++j)
      if (j != k) cols.push_back(j);
    psi(k - 1) = ((n + k) % 2 ? -1.0 : 1.0) * minor(m, rows, cols);
  }
  return psi;
}

namespace {

struct SmallestPair {
  double sigma = 0.0;
  double sigma_max = 0.0;
  Vector left, right;
};

SmallestPair smallest_singular(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto last = svd.singularValues().size() - 1;
  return {svd.singularValues()(last), svd.singularValues()(0), svd.matrixU().col(last),
          svd.matrixV().col(last)};
}

// Gradient of sigma_n at a, restricted to the tangent space of the sphere.
Vector sigma_gradient(const std::vector<Matrix>& slices, const Vector& a, const SmallestPair& sp) {
  Vector g(static_cast<Eigen::Index>(slices.size()));
  for (std::size_t k = 0; k < slices.size(); ++k) g(k) = sp.left.dot(slices[k] * sp.right);
  g -= g.dot(a) * a;
  return g;
}

Matrix pencil_of(const std::vector<Matrix>& slices, const Vector& a) {
  Matrix out = a(0) * slices[0];
  for (std::size_t k = 1; k < slices.size(); ++k) out += a(k) * slices[k];
  return out;
}

struct MarginRun {
  double value = std::numeric_limits<double>::infinity();
  Vector a;
};

MarginRun minimize_sigma(const std::vector<Matrix>& slices, Vector a, int iterations) {
  auto sp = smallest_singular(pencil_of(slices, a));
  double value = sp.sigma;
  double step = 1.0;
  for (int it = 0; it < iterations && value > 1e-15; ++it) {
    const Vector g = sigma_gradient(slices, a, sp);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-30) break;
    // Gauss-Newton step toward sigma = 0 first, plain descent as fallback.
    Vector trial = a - (value / g2) * g;
    trial.normalize();
    auto tsp = smallest_singular(pencil_of(slices, trial));
    if (tsp.sigma < value) {
      a = std::move(trial);
      sp = std::move(tsp);
      value = sp.sigma;
      continue;
    }
    step = std::min(step * 2.0, 1.0);
    bool accepted = false;
    while (step > 1e-12) {
      trial = a - step * g;
      trial.normalize();
      tsp = smallest_singular(pencil_of(slices, trial));
      if (tsp.sigma * tsp.sigma <= value * value - 1e-4 * step * 2.0 * value * g2) {
        a = std::move(trial);
        sp = std::move(tsp);
        value = sp.sigma;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {value, std::move(a)};
}

constexpr std::size_t kBatch = 16;

}  // namespace

AfcrMargin afcr_margin(const Tensor3& y, const SearchBudget& budget) {
  if (y.d1() < y.d2()) throw std::invalid_argument("afcr_margin: need u >= n");
  if (budget.restarts < 1) throw std::invalid_argument("afcr_margin: restarts must be >= 1");
  const double norm = y.frobenius_norm();
  AfcrMargin out;
  if (norm == 0.0) {
    out.argmin = Vector::Unit(y.d3(), 0);
    out.restarts_used = 1;
    return out;
  }
  std::vector<Matrix> slices = scaled(y, 1.0 / norm).slices();
  const auto total = static_cast<std::size_t>(budget.restarts);
  std::vector<MarginRun> runs(total);
  MarginRun best;
  std::size_t used = 0;
  // Fixed batches keep the early stop independent of the thread count.
  while (used < total) {
    const auto batch = std::min(kBatch, total - used);
    parallel_for(batch, [&](std::size_t i) {
      Rng rng(derive_seed(budget.seed, used + i));
      runs[used + i] = minimize_sigma(slices, random_unit(rng, y.d3()), budget.iterations);
    });
    for (std::size_t i = used; i < used + batch; ++i)
      if (runs[i].value < best.value) best = runs[i];
    used += batch;
    if (best.value < budget.tol_margin * 1e-3) break;
  }
  out.relative = best.value;
  out.margin = best.value * norm;
  out.afcr = out.relative > budget.tol_margin;
  out.argmin = best.a;
  out.restarts_used = static_cast<int>(used);
  return out;
}

double projective_distance(const Vector& a, const Vector& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

void polish_rank_drop(const Tensor3& y, Vector& a, Vector& b, int steps) {
  const int u = y.d1(), n = y.d2(), m = y.d3();
  const auto slices = y.slices();
  auto residual = [&](const Vector& aa, const Vector& bb) {
    Vector f(u + 2);
    f.head(u) = pencil_of(slices, aa) * bb;
    f(u) = 0.5 * (aa.squaredNorm() - 1.0);
    f(u + 1) = 0.5 * (bb.squaredNorm() - 1.0);
    return f;
  };
  Vector f = residual(a, b);
  for (int it = 0; it < steps; ++it) {
    Matrix jac = Matrix::Zero(u + 2, m + n);
    for (int k = 0; k < m; ++k) jac.block(0, k, u, 1) = slices[k] * b;
    jac.block(0, m, u, n) = pencil_of(slices, a);
    jac.block(u, 0, 1, m) = a.transpose();
    jac.block(u + 1, m, 1, n) = b.transpose();
    const Vector delta = jac.completeOrthogonalDecomposition().solve(-f);
    Vector an = a + delta.head(m), bn = b + delta.tail(n);
    const Vector fn = residual(an, bn);
    if (!(fn.norm() < f.norm())) break;
    a = std::move(an);
    b = std::move(bn);
    f = fn;
    if (f.norm() < 1e-15) break;
  }
  a.normalize();
  b.normalize();
}

namespace {

struct Candidate {
  bool ok = false;
  Vector a, b;
};

Candidate refine(const Tensor3& y, Vector a, const SearchBudget& budget) {
  if (!(a.norm() > 0.0) || !a.allFinite()) return {};
  a.normalize();
  Vector b = smallest_singular(contract_pencil(a, y)).right;
  polish_rank_drop(y, a, b);
  if (!a.allFinite() || !b.allFinite()) return {};
  const auto sp = smallest_singular(contract_pencil(a, y));
  if (sp.sigma_max == 0.0 || sp.sigma / sp.sigma_max >= budget.tol_rankdrop) return {};
  return {true, std::move(a), std::move(b)};
}

// Real points where det M(a0 - mu a1, Y) vanishes along the line.
std::vector<Vector> line_points(const std::vector<Matrix>& slices, const Vector& a0, const Vector& a1) {
  const Matrix m0 = pencil_of(slices, a0), m1 = pencil_of(slices, a1);
  Eigen::FullPivLU<Matrix> lu(m1);
  std::vector<Vector> out;
  if (!lu.isInvertible()) return out;
  Eigen::EigenSolver<Matrix> es(lu.solve(m0), false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> mu = es.eigenvalues()(i);
    if (std::abs(mu.imag()) > 1e-8 * (1.0 + std::abs(mu.real()))) continue;
    out.push_back(a0 - mu.real() * a1);
  }
  return out;
}

}  // namespace

std::vector<RankDropPoint> rank_drop_search(const Tensor3& y, const SearchBudget& budget,
                                            const std::vector<Vector>& seeds) {
  const int u = y.d1(), n = y.d2(), m = y.d3();
  if (u < n) throw std::invalid_argument("rank_drop_search: need u >= n");
  if (u - n + 1 >= m) throw std::invalid_argument("rank_drop_search: need v < m");
  if (budget.restarts < 1) throw std::invalid_argument("rank_drop_search: restarts must be >= 1");
  const auto slices = y.slices();

  // Starting points, each refined independently into slot i.
  std::vector<std::vector<Vector>> starts;
  for (const auto& s : seeds) starts.push_back({s});
  if (u == n) {
    for (int i = 0; i < budget.lines; ++i) starts.emplace_back();
    for (std::size_t i = 0; i < seeds.size(); ++i) starts.emplace_back();
  } else {
    for (int i = 0; i < budget.restarts; ++i) starts.emplace_back();
  }
  const auto fixed = seeds.size();
  std::vector<std::vector<Candidate>> found(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    Rng rng(derive_seed(budget.seed, i));
    std::vector<Vector> trial = starts[i];
    if (i >= fixed && u == n) {
      const auto line = i - fixed;
      Vector a0 = line < static_cast<std::size_t>(budget.lines) ? random_normal(rng, m)
                                                                : seeds[line - budget.lines];
      trial = line_points(slices, a0, random_normal(rng, m));
    } else if (i >= fixed) {
      trial = {random_normal(rng, m)};
    }
    for (auto& a : trial) {
      auto c = refine(y, std::move(a), budget);
      if (c.ok) found[i].push_back(std::move(c));
    }
  });

  std::vector<Vector> points;
  for (auto& list : found) {
    for (auto& c : list) {
      const bool dup = std::any_of(points.begin(), points.end(),
                                   [&](const Vector& p) { return projective_distance(p, c.a) < 1e-6; });
      if (!dup) points.push_back(c.a);
    }
  }

  std::vector<RankDropPoint> out;
  for (const auto& a : points) {
    const Matrix mat = contract_pencil(a, y);
    Eigen::JacobiSVD<Matrix> svd(mat, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double top = sv(0);
    for (int j = n - 1; j >= 0; --j) {
      const double s = j < sv.size() ? sv(j) : 0.0;
      if (s / top >= budget.tol_rankdrop) break;
      out.push_back({a, svd.matrixV().col(j), s / top});
    }
  }
  return out;
}

Vector corner_minors(const Vector& a, const Tensor3& y) {
  const int u = y.d1(), n = y.d2();
  const Matrix mat = contract_pencil(a, y);
  const auto cols = iota_from(1, n);
  Vector out(u - n + 1);
  for (int k = n; k <= u; ++k) {
    auto rows = iota_from(1, n - 1);
    rows.push_back(k);
    out(k - n) = minor(mat, rows, cols);
  }
  return out;
}

Matrix corner_minor_jacobian(const Vector& a, const Tensor3& y, const ProblemDims& dims) {
  const int u = y.d1(), n = y.d2(), m = y.d3();
  const int v = u - n + 1;
  if (v != dims.v() || m != dims.m()) throw std::invalid_argument("corner_minor_jacobian: dims mismatch");
  const Matrix mat = contract_pencil(a, y);
  const auto slices = y.slices();
  Matrix jac(v, v);
  for (int k = n; k <= u; ++k) {
    auto rows = iota_from(1, n - 1);
    rows.push_back(k);
    const auto cols = iota_from(1, n);
    const Matrix cof = cofactors(select(mat, rows, cols));
    for (int j = 0; j < v; ++j) {
      const Matrix dj = select(slices[m - v + j], rows, cols);
      jac(k - n, j) = cof.cwiseProduct(dj).sum();
    }
  }
  return jac;
}

PointRegularity point_regularity(const Vector& a, const Tensor3& y, const ProblemDims& dims) {
  PointRegularity out;
  const int n = y.d2();
  const Matrix mat = contract_pencil(a, y);
  out.corner = std::abs(det(mat.topLeftCorner(n - 1, n - 1)));
  out.jacobian = corner_minor_jacobian(a, y, dims);
  Eigen::JacobiSVD<Matrix> svd(out.jacobian);
  const auto& sv = svd.singularValues();
  out.jacobian_ok = sv(0) > 0.0 && sv(sv.size() - 1) / sv(0) > 1e-8;
  return out;
}

}  // namespace rankatlas
