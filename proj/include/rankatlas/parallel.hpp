#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include "rankatlas/tensor.hpp"

namespace rankatlas {

/// Worker count: hardware concurrency capped by RANKATLAS_THREADS.
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Callers write results into per-index slots so aggregation order never
/// depends on scheduling. The first exception thrown by any body is
/// rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Deterministic stream seed for sub-task `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

using Rng = std::mt19937_64;

Vector random_normal(Rng& rng, int size);
Vector random_unit(Rng& rng, int size);

}  // namespace rankatlas
