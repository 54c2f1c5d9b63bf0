#pragma once

// Typical ranks of R^{m x n x p} as a function of (m, n, p) and bounds on m#n.

#include <optional>
#include <string>
#include <vector>

#include "rankatlas/hopf.hpp"

namespace rankatlas {

enum class TrankKind { kExact, kConditional, kInterval };

struct TrankResult {
  TrankKind kind = TrankKind::kExact;
  std::vector<int> ranks;       // kExact; for kConditional the set when the condition holds
  std::vector<int> otherwise;   // kConditional: the set when it fails
  std::string condition;        // kConditional, e.g. "m#n <= 5"
  int lower = 0;                // kInterval: least possible typical rank
  std::optional<int> upper;     // kInterval: largest possible typical rank, if known
  std::string provenance;
  int m = 0, n = 0, p = 0;      // sorted so that m <= n <= p
  std::optional<HashBound> hash_bound;  // m#n bounds consulted, if any
};

/// Throws std::invalid_argument for nonpositive dimensions and
/// std::out_of_range if the table does not cover the two smaller dims.
TrankResult classify(int m, int n, int p, const HashBoundsTable& bounds);
/// Builds a bounds table just large enough for the query.
TrankResult classify(int m, int n, int p);

/// "{5, 6} (provenance)" and similar one-line renderings.
std::string format_result(const TrankResult& r);

}  // namespace rankatlas
