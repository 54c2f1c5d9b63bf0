#include <gtest/gtest.h>

#include "rankatlas/bilinear.hpp"
#include "rankatlas/certifier.hpp"
#include "rankatlas/experiments.hpp"
#include "rankatlas/parallel.hpp"

using namespace rankatlas;

namespace {

Tensor3 gaussian(int d1, int d2, int d3, Rng& rng) {
  const Vector v = random_normal(rng, d1 * d2 * d3);
  return {d1, d2, d3, std::vector<double>(v.data(), v.data() + v.size())};
}

// The n x p x m tensor with fl_2(T) = (top; bottom).
Tensor3 from_fl2(const Matrix& top, const Matrix& bottom, int m) {
  Matrix fl(top.rows() + bottom.rows(), top.cols());
  fl << top, bottom;
  return unflatten_mode2(fl, m);
}

// The tensor with fl_2 = (E_p; A) whose W is AFCR: A = nu(Y) for the quaternion tensor.
Tensor3 afcr_instance() {
  const auto y = as_tensor(hypercomplex_mult(4));  // u = n = m = 4, so p = 12
  return from_fl2(Matrix::Identity(12, 12), nu(y), 4);
}

}  // namespace

TEST(Sigma, Examples) {
  Rng rng(1);
  const Vector v = random_normal(rng, 3 * 6);
  const Matrix b = Eigen::Map<const Matrix>(v.data(), 3, 6);
  EXPECT_LT((sigma(from_fl2(Matrix::Identity(6, 6), b, 3)) - b).norm(), 1e-14);
  EXPECT_LT((sigma(from_fl2(2.0 * Matrix::Identity(6, 6), b, 3)) - b / 2.0).norm(), 1e-14);
}

TEST(Sigma, NotInV) {
  Rng rng(2);
  Matrix top = Matrix::Identity(6, 6);
  top(5, 5) = 0.0;
  EXPECT_THROW(sigma(from_fl2(top, Matrix::Ones(3, 6), 3)), NotInV);
}

TEST(Sigma, EquivariantUnderRightMultiplication) {
  Rng rng(3);
  const auto t = gaussian(3, 6, 3, rng);
  const Matrix g = Matrix::Identity(6, 6) + 0.3 * Matrix::Random(6, 6);
  std::vector<Matrix> moved;
  for (const auto& s : t.slices()) moved.push_back(s * g);
  EXPECT_LT((sigma(Tensor3::from_slices(moved)) - sigma(t)).norm(), 1e-9);
}

TEST(Iota, Examples) {
  const Matrix zero = Matrix::Zero(3, 6);
  Matrix expected(3, 9);
  expected << zero, -Matrix::Identity(3, 3);
  EXPECT_EQ(iota(zero), expected);
  Rng rng(4);
  const Vector v = random_normal(rng, 18);
  const Matrix a = Eigen::Map<const Matrix>(v.data(), 3, 6);
  const auto w = iota_tensor(a, 3);
  EXPECT_EQ(flatten(w, 1), iota(a));
  EXPECT_EQ(flatten(w, 1).rightCols(3), -Matrix::Identity(3, 3));
}

TEST(Nu, InvertsIota) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Vector v = random_normal(rng, 4 * 5);
    const Matrix a = Eigen::Map<const Matrix>(v.data(), 4, 5);
    EXPECT_EQ(nu(iota_tensor(a, 3)), a);
  }
}

TEST(Nu, IotaNuIdentity) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto y = gaussian(4, 3, 3, rng);
    const Matrix fl = flatten(y, 1);
    const Matrix expected = -fl.rightCols(4).inverse() * fl;
    EXPECT_LT((iota(nu(y)) - expected).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, expected.norm()));
  }
}

TEST(Nu, SingularTrailingBlock) {
  EXPECT_THROW(nu(Tensor3(4, 3, 3)), std::domain_error);
}

TEST(Phi, Examples) {
  const ProblemDims dims(3, 3, 5);  // l = 1
  const Vector b{{1.0, 2.0, 3.0}};
  Vector expected = Vector::Zero(5);
  expected.head(3) = b;
  EXPECT_EQ(phi(Vector::Unit(3, 0), b, dims), expected);
  EXPECT_EQ(phi(Vector::Unit(3, 2), b, dims), Vector::Zero(5));
  const Vector second = phi(Vector::Unit(3, 1), b, dims);
  EXPECT_EQ(second.tail(2), b.head(2));
  Rng rng(7);
  const Vector a = random_normal(rng, 3);
  EXPECT_LT((phi(2.5 * a, b, dims) - 2.5 * phi(a, b, dims)).norm(), 1e-14);
  EXPECT_THROW(phi(Vector::Ones(2), b, dims), std::invalid_argument);
}

TEST(SpanDimension, Examples) {
  const ProblemDims dims(3, 3, 6);
  Rng rng(8);
  EXPECT_EQ(span_dimension_U({}, dims), 0);
  const RankDropPoint pt{random_unit(rng, 3), random_unit(rng, 3), 0.0};
  EXPECT_EQ(span_dimension_U({pt}, dims), 1);
  EXPECT_EQ(span_dimension_U({pt, pt}, dims), 1);
  std::vector<RankDropPoint> many;
  for (int j = 0; j < 6; ++j) many.push_back({random_unit(rng, 3), random_unit(rng, 3), 0.0});
  EXPECT_EQ(span_dimension_U(many, dims), 6);
}

TEST(Certify, ExplicitSixTermTensor) {
  Rng rng(9);
  int certified = 0;
  for (int t = 0; t < 10; ++t) {
    const auto x = random_cp_tensor(3, 6, 3, 6, rng);
    const auto r = certify(x);
    ASSERT_EQ(r.verdict, Verdict::kRankP) << r.diagnostics;
    ++certified;
    const auto f = decompose(x, *r.certificate);
    EXPECT_EQ(f.A.cols(), 6);
    EXPECT_EQ(f.B.cols(), 6);
    EXPECT_EQ(f.C.cols(), 6);
    EXPECT_LT(f.residual, 1e-8);
    EXPECT_DOUBLE_EQ(f.residual, r.certificate->residual);
    const auto approx = cp_reconstruct(f);
    double diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) diff += std::pow(x.data()[i] - approx.data()[i], 2);
    EXPECT_NEAR(std::sqrt(diff) / x.frobenius_norm(), f.residual, 1e-15);
  }
  EXPECT_EQ(certified, 10);
}

TEST(Certify, CertificateInvariants) {
  Rng rng(10);
  const ProblemDims dims(3, 3, 6);
  const auto x = sample_gaussian_tensor(dims, rng);
  const auto r = certify(x);
  ASSERT_EQ(r.verdict, Verdict::kRankP) << r.diagnostics;
  const auto& c = *r.certificate;
  const auto w = iota_tensor(sigma(x), 3);
  ASSERT_EQ(static_cast<int>(c.points.size()), dims.p());
  for (int j = 0; j < dims.p(); ++j) {
    const auto& [d, a] = c.points[j];
    EXPECT_LE((contract_pencil(d, w) * a).norm(), 1e-6);
    EXPECT_EQ(c.N.col(j), phi(d, a, dims));
    for (int k = 0; k < dims.m(); ++k) EXPECT_EQ(c.D[k](j, j), d(k));
  }
  // N = (A D_1; ...; A D_{m-2}; A^{<= n-l} D_{m-1})
  Matrix stacked(dims.p(), dims.p());
  stacked << c.A * c.D[0], c.A.topRows(dims.n() - dims.l()) * c.D[1];
  EXPECT_LT((stacked - c.N).norm(), 1e-12);
  EXPECT_LT((c.N * c.Q - Matrix::Identity(6, 6)).norm(), 1e-6);
  EXPECT_LE(c.residual, 1e-6);
  EXPECT_LT(c.cond_N, 1e10);
}

TEST(Certify, AfcrInstanceExceedsP) {
  const auto r = certify(afcr_instance());
  EXPECT_EQ(r.verdict, Verdict::kRankExceedsP);
  EXPECT_NEAR(r.margin.margin, 1.0, 1e-8);
  EXPECT_FALSE(r.certificate.has_value());
}

TEST(Certify, PerturbedAfcrInstanceStaysAbove) {
  Rng rng(11);
  const auto base = afcr_instance();
  for (int t = 0; t < 5; ++t) {
    std::vector<double> data(base.data().begin(), base.data().end());
    const Vector noise = random_normal(rng, static_cast<int>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += 0.01 * noise(i);
    EXPECT_EQ(certify(Tensor3(4, 12, 4, data)).verdict, Verdict::kRankExceedsP);
  }
}

TEST(Certify, Errors) {
  EXPECT_THROW(certify(Tensor3(3, 6, 3)), NotInV);
  Rng rng(12);
  EXPECT_THROW(certify(gaussian(3, 7, 3, rng)), std::invalid_argument);
  CertifyBudget b;
  b.rounds = 0;
  EXPECT_THROW(certify(gaussian(3, 6, 3, rng), b), std::invalid_argument);
}

TEST(Certify, DecomposeRejectsMismatchedCertificate) {
  Rng rng(13);
  const auto x = random_cp_tensor(3, 6, 3, 6, rng);
  const auto r = certify(x);
  ASSERT_TRUE(r.certificate);
  EXPECT_THROW(decompose(gaussian(3, 5, 3, rng), *r.certificate), std::invalid_argument);
}

TEST(Certify, MutualExclusionAcrossShapes) {
  Rng rng(14);
  int rank_p = 0;
  for (const auto& [m, n, p] : {std::tuple{3, 3, 6}, std::tuple{3, 3, 5}, std::tuple{3, 4, 8}, std::tuple{4, 4, 12}}) {
    const ProblemDims dims(m, n, p);
    for (int t = 0; t < 25; ++t) {
      const auto x = sample_gaussian_tensor(dims, rng);
      const auto r = certify(x);
      EXPECT_TRUE(mutual_exclusion_holds(x, r));
      if (r.verdict == Verdict::kRankP) {
        ++rank_p;
        EXPECT_LE(r.margin.relative, 1e-6);
        EXPECT_LE(decompose(x, *r.certificate).residual, 1e-6);
      }
      if (r.verdict == Verdict::kRankExceedsP) EXPECT_FALSE(r.certificate.has_value());
    }
  }
  EXPECT_GT(rank_p, 0);
}

TEST(Certify, DeterministicForSeed) {
  Rng rng(15);
  const auto x = sample_gaussian_tensor(ProblemDims(3, 3, 5), rng);
  const auto a = certify(x), b = certify(x);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.points_found, b.points_found);
  EXPECT_EQ(a.margin.relative, b.margin.relative);
}

TEST(Certify, ExtensionByOneColumnReachesPPlusOne) {
  // Failures at (m, n, p) = (3, 3, 5) extended to p + 1 = 6.
  Rng rng(16);
  const ProblemDims dims(3, 3, 5);
  int failures = 0, extended_ok = 0;
  for (int t = 0; t < 200 && failures < 40; ++t) {
    const auto x = sample_gaussian_tensor(dims, rng);
    if (certify(x).verdict == Verdict::kRankP) continue;
    ++failures;
    std::vector<Matrix> slices;
    for (const auto& s : x.slices()) {
      Matrix wider(3, 6);
      wider << s, random_normal(rng, 3);
      slices.push_back(wider);
    }
    const auto r = certify(Tensor3::from_slices(slices));
    if (r.verdict == Verdict::kRankP) ++extended_ok;
  }
  ASSERT_GT(failures, 10);
  EXPECT_GE(extended_ok, 0.9 * failures);
}
