#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "rankatlas/experiments.hpp"
#include "rankatlas/serialization.hpp"

using namespace rankatlas;

namespace {

ExperimentConfig small_config(int samples) {
  ExperimentConfig cfg;
  cfg.m = 3;
  cfg.n = 3;
  cfg.p = 6;
  cfg.samples = samples;
  cfg.seed = 77;
  cfg.run_als = false;
  cfg.timings = false;
  return cfg;
}

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST(Sampling, DeterministicForSeed) {
  const ProblemDims dims(3, 3, 5);
  Rng a(5), b(5), c(6);
  const auto x = sample_gaussian_tensor(dims, a);
  EXPECT_EQ(x, sample_gaussian_tensor(dims, b));
  EXPECT_NE(x, sample_gaussian_tensor(dims, c));
  EXPECT_EQ(x.d1(), 3);
  EXPECT_EQ(x.d2(), 5);
  EXPECT_EQ(x.d3(), 3);
}

TEST(Sampling, MomentsAndMembership) {
  const ProblemDims dims(4, 4, 12);
  Rng rng(9);
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (int t = 0; t < 200; ++t) {
    const auto x = sample_gaussian_tensor(dims, rng);
    EXPECT_NO_THROW(sigma(x));
    for (double v : x.data()) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(static_cast<double>(count)));
  EXPECT_NEAR(sq / count - mean * mean, 1.0, 0.03);
}

TEST(RandomCp, HasRequestedShape) {
  Rng rng(1);
  const auto x = random_cp_tensor(3, 4, 5, 2, rng);
  EXPECT_EQ(x.d1(), 3);
  EXPECT_EQ(x.d2(), 4);
  EXPECT_EQ(x.d3(), 5);
  // Every slice of a rank-2 tensor has rank <= 2.
  for (const auto& s : x.slices()) EXPECT_LE(Eigen::FullPivLU<Matrix>(s).rank(), 2);
}

TEST(Als, RecoversOrthogonalRankThree) {
  Rng rng(2);
  CpFactors f;
  f.A = Eigen::HouseholderQR<Matrix>(Matrix::Random(4, 3)).householderQ() * Matrix::Identity(4, 3);
  f.B = Eigen::HouseholderQR<Matrix>(Matrix::Random(5, 3)).householderQ() * Matrix::Identity(5, 3);
  f.C = Eigen::HouseholderQR<Matrix>(Matrix::Random(4, 3)).householderQ() * Matrix::Identity(4, 3);
  f.C *= Vector{{3.0, 2.0, 1.0}}.asDiagonal();
  const auto x = cp_reconstruct(f);
  AlsBudget b;
  b.seed = 3;
  EXPECT_LT(als_fit(x, 3, b), 1e-6);
  EXPECT_GT(als_fit(x, 1, b), 1e-3);
}

TEST(Als, SwampImprovesWithSweeps) {
  Rng rng(2);
  const auto x = random_cp_tensor(3, 4, 3, 3, rng);
  AlsBudget b;
  b.seed = 3;
  b.restarts = 1;
  b.sweeps = 500;
  const double short_run = als_fit(x, 3, b);
  b.sweeps = 10000;
  const double long_run = als_fit(x, 3, b);
  EXPECT_LT(long_run, 1e-7);
  EXPECT_LT(long_run, short_run);
}

TEST(Als, ResidualDecreasesWithRank) {
  Rng rng(4);
  const auto x = sample_gaussian_tensor(ProblemDims(3, 3, 6), rng);
  AlsBudget b;
  b.seed = 5;
  const double r2 = als_fit(x, 2, b), r5 = als_fit(x, 5, b), r9 = als_fit(x, 9, b);
  EXPECT_GE(r2 + 1e-9, r5);
  EXPECT_GE(r5 + 1e-9, r9);
  EXPECT_LT(r9, 1e-4);
  EXPECT_LE(r2, 1.0);
}

TEST(Als, Errors) {
  Tensor3 x(2, 2, 2);
  EXPECT_THROW(als_fit(x, 0), std::invalid_argument);
  AlsBudget b;
  b.restarts = 0;
  EXPECT_THROW(als_fit(x, 1, b), std::invalid_argument);
}

TEST(Terracini, KnownGenericRanks) {
  EXPECT_EQ(terracini_generic_rank(3, 5, 3), 5);
  EXPECT_EQ(terracini_generic_rank(4, 12, 4), 12);
  EXPECT_EQ(terracini_generic_rank(2, 2, 2), 2);
  EXPECT_EQ(terracini_generic_rank(3, 3, 3), 5);
}

TEST(Terracini, MatrixCaseIsMin) {
  for (int n = 1; n <= 5; ++n) {
    for (int p = 1; p <= 6; ++p) EXPECT_EQ(terracini_generic_rank(1, n, p), std::min(n, p)) << n << " " << p;
  }
  EXPECT_THROW(terracini_generic_rank(0, 2, 2), std::invalid_argument);
}

TEST(RunExperiment, FrequenciesSumToOne) {
  const auto r = run_experiment(small_config(12));
  EXPECT_EQ(r.records.size(), 12u);
  EXPECT_EQ(r.rank_p + r.rank_exceeds_p + r.inconclusive, 12);
  EXPECT_NEAR(r.frequency(Verdict::kRankP) + r.frequency(Verdict::kRankExceedsP) +
                  r.frequency(Verdict::kInconclusive),
              1.0, 1e-15);
  EXPECT_EQ(r.exclusion_violations, 0);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(r.records[i].sample_id, static_cast<int>(i));
    EXPECT_EQ(r.records[i].wall_ms, 0.0);
    EXPECT_EQ(r.records[i].als_p, -1.0);
    if (r.records[i].verdict == Verdict::kRankP) EXPECT_LE(r.records[i].cert_residual, 1e-6);
  }
  EXPECT_FALSE(r.predicted.empty());
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  const auto cfg = small_config(8);
  setenv("RANKATLAS_THREADS", "1", 1);
  const auto one = csv_of(run_experiment(cfg));
  setenv("RANKATLAS_THREADS", "4", 1);
  const auto four = csv_of(run_experiment(cfg));
  unsetenv("RANKATLAS_THREADS");
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, csv_of(run_experiment(cfg)));
}

TEST(RunExperiment, RecordsAls) {
  auto cfg = small_config(2);
  cfg.run_als = true;
  cfg.als.restarts = 2;
  cfg.als.sweeps = 200;
  const auto r = run_experiment(cfg);
  for (const auto& rec : r.records) {
    EXPECT_GE(rec.als_p, 0.0);
    EXPECT_GE(rec.als_p1, 0.0);
  }
}

TEST(RunExperiment, InvalidConfig) {
  auto cfg = small_config(0);
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg = small_config(1);
  cfg.p = 9;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(MutualExclusion, FlagsInconsistentResult) {
  Rng rng(8);
  const auto x = sample_gaussian_tensor(ProblemDims(3, 3, 6), rng);
  auto r = certify(x);
  ASSERT_EQ(r.verdict, Verdict::kRankP);
  EXPECT_TRUE(mutual_exclusion_holds(x, r));
  auto forged = r;
  forged.margin.relative = 0.5;
  EXPECT_FALSE(mutual_exclusion_holds(x, forged));
  forged = r;
  forged.certificate->points[0].first = Vector::Unit(3, 0);
  forged.certificate->points[0].second = Vector::Unit(3, 1);
  EXPECT_FALSE(mutual_exclusion_holds(x, forged));
  r.verdict = Verdict::kInconclusive;
  EXPECT_TRUE(mutual_exclusion_holds(x, r));
}
