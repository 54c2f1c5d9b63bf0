#include "rankatlas/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rankatlas/parallel.hpp"

namespace rankatlas {

namespace {

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double low = sv(sv.size() - 1);
  return low == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / low;
}

Matrix leading_block(const Tensor3& t) {
  return flatten(t, 2).topRows(t.d2());
}

}  // namespace

Matrix sigma(const Tensor3& t) {
  const auto dims = ProblemDims::of_tensor(t);
  const Matrix fl = flatten(t, 2);
  const Matrix n0 = fl.topRows(dims.p());
  if (!(condition_number(n0) < 1e12)) throw NotInV("sigma: leading p x p block of fl_2(T) is singular");
  return n0.transpose().partialPivLu().solve(fl.bottomRows(dims.u()).transpose()).transpose();
}

Matrix iota(const Matrix& a) {
  const auto u = a.rows();
  Matrix out(u, a.cols() + u);
  out << a, -Matrix::Identity(u, u);
  return out;
}

Tensor3 iota_tensor(const Matrix& a, int m) { return unflatten_mode1(iota(a), m); }

Matrix nu(const Tensor3& y) {
  const Matrix fl = flatten(y, 1);
  const auto u = fl.rows();
  const auto p = fl.cols() - u;
  if (p < 0) throw std::invalid_argument("nu: fl_1(Y) has fewer columns than rows");
  const Matrix tail = fl.rightCols(u);
  if (!(condition_number(tail) < 1e12)) throw std::domain_error("nu: trailing u x u block is singular");
  return -tail.partialPivLu().solve(fl.leftCols(p));
}

Vector phi(const Vector& a, const Vector& b, const ProblemDims& dims) {
  const int m = dims.m(), n = dims.n(), l = dims.l();
  if (a.size() != m || b.size() != n) throw std::invalid_argument("phi: dimension mismatch");
  Vector out(dims.p());
  for (int k = 0; k < m - 2; ++k) out.segment(k * n, n) = a(k) * b;
  out.tail(n - l) = a(m - 2) * b.head(n - l);
  return out;
}

namespace {

Matrix phi_columns(const std::vector<RankDropPoint>& points, const ProblemDims& dims) {
  Matrix out(dims.p(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) out.col(j) = phi(points[j].a, points[j].b, dims);
  return out;
}

int numerical_rank(const Matrix& m) {
  if (m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  return static_cast<int>((sv.array() > 1e-8 * sv(0)).count());
}

}  // namespace

int span_dimension_U(const std::vector<RankDropPoint>& points, const ProblemDims& dims) {
  return numerical_rank(phi_columns(points, dims));
}

Tensor3 cp_reconstruct(const CpFactors& f) {
  std::vector<Matrix> slices;
  for (Eigen::Index k = 0; k < f.C.rows(); ++k) {
    slices.emplace_back(f.A * f.C.row(k).transpose().asDiagonal() * f.B.transpose());
  }
  return Tensor3::from_slices(slices);
}

namespace {

double relative_residual(const Tensor3& t, const Tensor3& approx) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = t.data()[i] - approx.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc) / t.frobenius_norm();
}

}  // namespace

CpFactors decompose(const Tensor3& t, const RankCertificate& cert) {
  const auto dims = ProblemDims::of_tensor(t);
  if (!(dims == cert.dims)) throw std::invalid_argument("decompose: certificate dims do not match tensor");
  CpFactors f;
  f.A = cert.A;
  f.B = (cert.Q * leading_block(t)).transpose();
  f.C.resize(dims.m(), dims.p());
  for (int j = 0; j < dims.p(); ++j) f.C.col(j) = cert.points[j].first;
  f.residual = relative_residual(t, cp_reconstruct(f));
  return f;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kRankP: return "RankP";
    case Verdict::kRankExceedsP: return "RankExceedsP";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

void merge_points(std::vector<RankDropPoint>& into, const std::vector<RankDropPoint>& more) {
  for (const auto& p : more) {
    const bool dup = std::any_of(into.begin(), into.end(), [&](const RankDropPoint& q) {
      return projective_distance(p.a, q.a) < 1e-6 && projective_distance(p.b, q.b) < 1e-6;
    });
    if (!dup) into.push_back(p);
  }
}

}  // namespace

CertifyResult certify(const Tensor3& t, const CertifyBudget& budget) {
  const auto dims = ProblemDims::of_tensor(t);
  if (budget.rounds < 1 || budget.search.restarts < 1) {
    throw std::invalid_argument("certify: budget must be positive");
  }
  const Tensor3 w = iota_tensor(sigma(t), dims.m());

  CertifyResult out;
  out.margin = afcr_margin(w, budget.search);
  std::ostringstream diag;
  diag.precision(3);
  if (out.margin.afcr) {
    out.verdict = Verdict::kRankExceedsP;
    diag << "relative margin " << out.margin.relative << " above tolerance";
    out.diagnostics = diag.str();
    return out;
  }

  std::vector<RankDropPoint> points;
  for (int round = 0; round < budget.rounds; ++round) {
    SearchBudget sb = budget.search;
    sb.seed = derive_seed(budget.search.seed, 1000 + round);
    merge_points(points, rank_drop_search(w, sb, {out.margin.argmin}));
    out.span_dim = span_dimension_U(points, dims);
    if (out.span_dim >= dims.p()) break;
  }
  out.points_found = static_cast<int>(points.size());
  if (out.span_dim < dims.p()) {
    diag << "span " << out.span_dim << " < p = " << dims.p() << " from " << points.size() << " points";
    out.diagnostics = diag.str();
    return out;
  }

  // Pick p columns with independent phi by column-pivoted QR.
  const Matrix cols = phi_columns(points, dims);
  Eigen::ColPivHouseholderQR<Matrix> qr(cols);
  std::vector<int> chosen;
  for (int j = 0; j < dims.p(); ++j) chosen.push_back(qr.colsPermutation().indices()(j));
  std::sort(chosen.begin(), chosen.end());

  RankCertificate cert{dims, {}, Matrix(dims.n(), dims.p()), {}, Matrix(dims.p(), dims.p()), {}, 0, 0, 0};
  for (int j = 0; j < dims.p(); ++j) {
    const auto& pt = points[chosen[j]];
    cert.points.emplace_back(pt.a, pt.b);
    cert.A.col(j) = pt.b;
    cert.N.col(j) = cols.col(chosen[j]);
    cert.equation_residual = std::max(cert.equation_residual, (contract_pencil(pt.a, w) * pt.b).norm());
  }
  for (int k = 0; k < dims.m(); ++k) {
    Vector diagonal(dims.p());
    for (int j = 0; j < dims.p(); ++j) diagonal(j) = cert.points[j].first(k);
    cert.D.emplace_back(diagonal.asDiagonal());
  }
  cert.cond_N = condition_number(cert.N);
  if (!(cert.cond_N < budget.cond_limit)) {
    diag << "cond(N) = " << cert.cond_N << " exceeds limit";
    out.diagnostics = diag.str();
    return out;
  }
  cert.Q = cert.N.partialPivLu().inverse();
  cert.residual = decompose(t, cert).residual;
  if (cert.equation_residual > budget.residual_tol || !(cert.residual <= budget.residual_tol)) {
    diag << "equation residual " << cert.equation_residual << ", reconstruction residual "
         << cert.residual;
    out.diagnostics = diag.str();
    return out;
  }
  diag << "certified with " << points.size() << " points, cond(N) = " << cert.cond_N;
  out.diagnostics = diag.str();
  out.verdict = Verdict::kRankP;
  out.certificate = std::move(cert);
  return out;
}

}  // namespace rankatlas
