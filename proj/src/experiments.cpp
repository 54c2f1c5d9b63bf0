#include "rankatlas/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rankatlas/trank.hpp"

namespace rankatlas {

Tensor3 sample_gaussian_tensor(const ProblemDims& dims, Rng& rng) {
  const int n = dims.n(), p = dims.p(), m = dims.m();
  for (;;) {
    const Vector v = random_normal(rng, n * p * m);
    Tensor3 t(n, p, m, std::vector<double>(v.data(), v.data() + v.size()));
    Eigen::JacobiSVD<Matrix> svd(flatten(t, 2).topRows(p));
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) < 1e12) return t;
  }
}

Tensor3 random_cp_tensor(int d1, int d2, int d3, int r, Rng& rng) {
  CpFactors f;
  f.A = Matrix(d1, r);
  f.B = Matrix(d2, r);
  f.C = Matrix(d3, r);
  for (int j = 0; j < r; ++j) {
    f.A.col(j) = random_normal(rng, d1);
    f.B.col(j) = random_normal(rng, d2);
    f.C.col(j) = random_normal(rng, d3);
  }
  return cp_reconstruct(f);
}

namespace {

// Sum over the two other modes of T against the factor columns.
Matrix mttkrp(const Tensor3& t, const Matrix& x, const Matrix& y, int mode) {
  const int r = static_cast<int>(x.cols());
  const int dims[3] = {t.d1(), t.d2(), t.d3()};
  Matrix out = Matrix::Zero(dims[mode], r);
  for (int k = 0; k < t.d3(); ++k) {
    for (int i = 0; i < t.d1(); ++i) {
      for (int j = 0; j < t.d2(); ++j) {
        const double v = t(i, j, k);
        if (mode == 0) out.row(i) += v * x.row(j).cwiseProduct(y.row(k));
        if (mode == 1) out.row(j) += v * x.row(i).cwiseProduct(y.row(k));
        if (mode == 2) out.row(k) += v * x.row(i).cwiseProduct(y.row(j));
      }
    }
  }
  return out;
}

Matrix solve_gram(const Matrix& rhs, const Matrix& gram) {
  return gram.completeOrthogonalDecomposition().solve(rhs.transpose()).transpose();
}

double fit_residual(const Tensor3& t, const CpFactors& f) {
  const Tensor3 approx = cp_reconstruct(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = t.data()[i] - approx.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc) / t.frobenius_norm();
}

}  // namespace

double als_fit(const Tensor3& t, int r, const AlsBudget& budget) {
  if (r < 1) throw std::invalid_argument("als_fit: rank must be >= 1");
  if (budget.restarts < 1) throw std::invalid_argument("als_fit: restarts must be >= 1");
  if (t.frobenius_norm() == 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < budget.restarts; ++restart) {
    Rng rng(derive_seed(budget.seed, restart));
    CpFactors f;
    f.A = Matrix(t.d1(), r);
    f.B = Matrix(t.d2(), r);
    f.C = Matrix(t.d3(), r);
    for (int j = 0; j < r; ++j) {
      f.A.col(j) = random_normal(rng, t.d1());
      f.B.col(j) = random_normal(rng, t.d2());
      f.C.col(j) = random_normal(rng, t.d3());
    }
    double prev = std::numeric_limits<double>::infinity();
    double res = prev;
    for (int sweep = 0; sweep < budget.sweeps; ++sweep) {
      f.A = solve_gram(mttkrp(t, f.B, f.C, 0), (f.B.transpose() * f.B).cwiseProduct(f.C.transpose() * f.C));
      f.B = solve_gram(mttkrp(t, f.A, f.C, 1), (f.A.transpose() * f.A).cwiseProduct(f.C.transpose() * f.C));
      f.C = solve_gram(mttkrp(t, f.A, f.B, 2), (f.A.transpose() * f.A).cwiseProduct(f.B.transpose() * f.B));
      res = fit_residual(t, f);
      if (!std::isfinite(res) || res < 1e-14 || std::abs(prev - res) < budget.stagnation) break;
      prev = res;
    }
    if (std::isfinite(res)) best = std::min(best, res);
  }
  return best;
}

int terracini_generic_rank(int d1, int d2, int d3, std::uint64_t seed, double threshold) {
  if (d1 < 1 || d2 < 1 || d3 < 1) throw std::invalid_argument("terracini_generic_rank: dims must be positive");
  const int total = d1 * d2 * d3;
  Rng rng(seed);
  std::vector<Vector> as, bs, cs;
  Matrix jac(total, 0);
  int previous = 0;
  for (int r = 1; r <= total; ++r) {
    as.push_back(random_normal(rng, d1));
    bs.push_back(random_normal(rng, d2));
    cs.push_back(random_normal(rng, d3));
    const Vector& a = as.back();
    const Vector& b = bs.back();
    const Vector& c = cs.back();
    Matrix block = Matrix::Zero(total, d1 + d2 + d3);
    for (int k = 0; k < d3; ++k) {
      for (int i = 0; i < d1; ++i) {
        for (int j = 0; j < d2; ++j) {
          const auto row = (static_cast<Eigen::Index>(k) * d1 + i) * d2 + j;
          block(row, i) = b(j) * c(k);
          block(row, d1 + j) = a(i) * c(k);
          block(row, d1 + d2 + k) = a(i) * b(j);
        }
      }
    }
    Matrix next(total, jac.cols() + block.cols());
    next << jac, block;
    jac = std::move(next);
    Eigen::JacobiSVD<Matrix> svd(jac);
    const auto& sv = svd.singularValues();
    const int rank = static_cast<int>((sv.array() > threshold * sv(0)).count());
    if (rank == total) return r;
    if (rank == previous) return r - 1;
    previous = rank;
  }
  return total;
}

double ExperimentReport::frequency(Verdict v) const {
  if (records.empty()) return 0.0;
  const int count = v == Verdict::kRankP ? rank_p : v == Verdict::kRankExceedsP ? rank_exceeds_p : inconclusive;
  return static_cast<double>(count) / static_cast<double>(records.size());
}

bool mutual_exclusion_holds(const Tensor3& t, const CertifyResult& result, double tol) {
  if (result.verdict != Verdict::kRankP || !result.certificate) return true;
  if (result.margin.relative > tol) return false;
  const auto dims = ProblemDims::of_tensor(t);
  const Tensor3 w = iota_tensor(sigma(t), dims.m());
  const double norm = w.frobenius_norm();
  for (const auto& [d, a] : result.certificate->points) {
    Eigen::JacobiSVD<Matrix> svd(contract_pencil(d, w));
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) / norm > tol) return false;
  }
  return true;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const ProblemDims dims(cfg.m, cfg.n, cfg.p);
  if (cfg.samples < 1) throw std::invalid_argument("run_experiment: samples must be >= 1");
  ExperimentReport report;
  report.config = cfg;
  report.records.resize(cfg.samples);
  parallel_for(report.records.size(), [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const auto stream = derive_seed(cfg.seed, i);
    Rng rng(stream);
    const Tensor3 t = sample_gaussian_tensor(dims, rng);
    CertifyBudget cb = cfg.certify;
    cb.search.seed = derive_seed(stream, 1);
    const auto result = certify(t, cb);
    SampleRecord& rec = report.records[i];
    rec.sample_id = static_cast<int>(i);
    rec.verdict = result.verdict;
    if (result.certificate) rec.cert_residual = result.certificate->residual;
    rec.points_found = result.points_found;
    rec.span_dim = result.span_dim;
    rec.margin_relative = result.margin.relative;
    rec.exclusion_ok = mutual_exclusion_holds(t, result, cb.search.tol_margin);
    if (cfg.run_als) {
      AlsBudget ab = cfg.als;
      ab.seed = derive_seed(stream, 2);
      rec.als_p = als_fit(t, dims.p(), ab);
      rec.als_p1 = als_fit(t, dims.p() + 1, ab);
    }
    if (cfg.timings) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });
  for (const auto& rec : report.records) {
    switch (rec.verdict) {
      case Verdict::kRankP: ++report.rank_p; break;
      case Verdict::kRankExceedsP: ++report.rank_exceeds_p; break;
      case Verdict::kInconclusive: ++report.inconclusive; break;
    }
    if (!rec.exclusion_ok) ++report.exclusion_violations;
    report.max_cert_residual = std::max(report.max_cert_residual, rec.cert_residual);
  }
  report.predicted = format_result(classify(cfg.m, cfg.n, cfg.p));
  return report;
}

}  // namespace rankatlas
