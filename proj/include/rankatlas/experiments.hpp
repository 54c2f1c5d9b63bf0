#pragma once

// Monte-Carlo harness: Gaussian sampling, an ALS oracle, a Terracini
// generic-rank check and per-sample certification reports.

#include <cstdint>
#include <string>
#include <vector>

#include "rankatlas/certifier.hpp"
#include "rankatlas/parallel.hpp"
#include "rankatlas/tensor.hpp"

namespace rankatlas {

/// iid N(0, 1) n x p x m tensor, resampled until the leading p x p block
/// of fl_2 has condition number below 1e12.
Tensor3 sample_gaussian_tensor(const ProblemDims& dims, Rng& rng);

/// Sum of r random Gaussian rank-one d1 x d2 x d3 terms.
Tensor3 random_cp_tensor(int d1, int d2, int d3, int r, Rng& rng);

struct AlsBudget {
  int restarts = 5;
  int sweeps = 500;
  double stagnation = 1e-12;
  std::uint64_t seed = 1;
};

/// Best relative residual |T - T^|_F / |T|_F over ALS restarts at rank r.
double als_fit(const Tensor3& t, int r, const AlsBudget& budget = {});

/// Smallest r at which the CP parametrization has a Jacobian of rank
/// d1*d2*d3 (or stops gaining rank), at a random point.
int terracini_generic_rank(int d1, int d2, int d3, std::uint64_t seed = 1, double threshold = 1e-8);

struct ExperimentConfig {
  int m = 3, n = 3, p = 6;  // samples are n x p x m
  int samples = 100;
  std::uint64_t seed = 1;
  CertifyBudget certify;
  AlsBudget als;
  bool run_als = true;
  bool timings = true;  // false writes wall_ms = 0 so output is byte-stable
  std::string csv_path;
  std::string summary_path;
};

struct SampleRecord {
  int sample_id = 0;
  Verdict verdict = Verdict::kInconclusive;
  double cert_residual = -1.0;  // -1 when no certificate
  double als_p = -1.0;
  double als_p1 = -1.0;
  int points_found = 0;
  int span_dim = 0;
  double wall_ms = 0.0;
  double margin_relative = 0.0;
  bool exclusion_ok = true;  // a RankP verdict never coexists with an AFCR margin
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SampleRecord> records;
  int rank_p = 0, rank_exceeds_p = 0, inconclusive = 0;
  int exclusion_violations = 0;
  double max_cert_residual = 0.0;
  std::string predicted;  // classifier output for (m, n, p)

  [[nodiscard]] double frequency(Verdict v) const;
};

/// Throws std::invalid_argument for invalid configs.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// True when a RankP result is backed by a tolerance-level margin and
/// every certificate point is a rank-drop point of W.
bool mutual_exclusion_holds(const Tensor3& t, const CertifyResult& result, double tol = 1e-6);

}  // namespace rankatlas
