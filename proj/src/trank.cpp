#include "rankatlas/trank.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace rankatlas {

namespace {

TrankResult exact(std::vector<int> ranks, std::string provenance) {
  TrankResult r;
  r.kind = TrankKind::kExact;
  r.ranks = std::move(ranks);
  r.provenance = std::move(provenance);
  return r;
}

// Plurality {p, p+1} exactly when m#n <= threshold; {p} otherwise.
TrankResult by_threshold(int p, int threshold, const HashBound& hb, const std::string& provenance) {
  if (hb.upper <= threshold) return exact({p, p + 1}, provenance);
  if (hb.lower > threshold) return exact({p}, provenance);
  TrankResult r;
  r.kind = TrankKind::kConditional;
  r.ranks = {p, p + 1};
  r.otherwise = {p};
  r.condition = "m#n <= " + std::to_string(threshold);
  r.provenance = provenance;
  return r;
}

int generic_floor(int m, int n, int p) {
  const long long num = 1LL * m * n * p;
  const long long den = m + n + p - 2;
  return static_cast<int>(std::max<long long>((num + den - 1) / den, std::min(p, m * n)));
}

TrankResult dispatch(int m, int n, int p, const HashBoundsTable& bounds, std::optional<HashBound>& used) {
  if (m == 1) return exact({n}, "matrix rank");
  if (m == 2) {
    if (n == p) return exact({n, n + 1}, "2 x n x n pencils");
    return exact({std::min(p, 2 * n)}, "2 x n x p pencils");
  }
  if (p >= (m - 1) * n + 1) return exact({std::min(p, m * n)}, "p > (m-1)n gives min(p, mn)");

  const int boundary = (m - 1) * (n - 1) + 1;
  const HashBound hb = bounds.at(m, n);
  used = hb;
  const int u = m * n - p;

  if (p == (m - 1) * n) {
    auto r = by_threshold(p, n, hb, "p = (m-1)n: nonsingular map R^m x R^n -> R^n");
    const auto via_k = by_threshold(p, u, hb, r.provenance);
    if (via_k.kind != r.kind || via_k.ranks != r.ranks) {
      throw std::logic_error("classify: p = (m-1)n branch disagrees with the k-formula");
    }
    return r;
  }
  if (p >= boundary + 1) return by_threshold(p, u, hb, "m#n <= mn - p decides plurality");
  if (p == boundary) {
    if (!bit_disjoint(m - 1, n - 1)) return exact({p, p + 1}, "boundary plurality + p+1 upper bound");
    TrankResult r;
    r.kind = TrankKind::kInterval;
    r.lower = p;
    r.upper = p + 1;
    r.provenance = "boundary case with m-1, n-1 bit-disjoint is undetermined";
    return r;
  }
  // Below the boundary; the propagation needs m#n = m+n-1.
  const int k = (m - 1) * (n - 1) - p;
  if (hb.lower == m + n - 1 && 1LL * k * (m + n - 1) < 1LL * (m - 1) * (n - 1)) {
    const bool small = k <= m / 2 - 1;
    return exact({boundary}, small ? "projection from the boundary, k <= floor(m/2)-1"
                                   : "projection from the boundary");
  }
  TrankResult r;
  r.kind = TrankKind::kInterval;
  r.lower = generic_floor(m, n, p);
  r.provenance = "generic rank lower bound only";
  return r;
}

}  // namespace

TrankResult classify(int m, int n, int p, const HashBoundsTable& bounds) {
  if (m < 1 || n < 1 || p < 1) throw std::invalid_argument("classify: dimensions must be positive");
  std::array<int, 3> d{m, n, p};
  std::sort(d.begin(), d.end());
  std::optional<HashBound> used;
  TrankResult r = dispatch(d[0], d[1], d[2], bounds, used);
  r.m = d[0];
  r.n = d[1];
  r.p = d[2];
  r.hash_bound = used;
  return r;
}

TrankResult classify(int m, int n, int p) {
  if (m < 1 || n < 1 || p < 1) throw std::invalid_argument("classify: dimensions must be positive");
  std::array<int, 3> d{m, n, p};
  std::sort(d.begin(), d.end());
  const auto table = build_bounds_table(std::max(2, d[1]));
  return classify(m, n, p, table);
}

namespace {

std::string set_string(const std::vector<int>& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? ", " : "") << s[i];
  os << '}';
  return os.str();
}

}  // namespace

std::string format_result(const TrankResult& r) {
  std::ostringstream os;
  switch (r.kind) {
    case TrankKind::kExact:
      os << set_string(r.ranks);
      break;
    case TrankKind::kConditional:
      os << set_string(r.ranks) << " if " << r.condition << ", else " << set_string(r.otherwise);
      break;
    case TrankKind::kInterval:
      os << "within [" << r.lower << ", " << (r.upper ? std::to_string(*r.upper) : "?") << "]";
      break;
  }
  os << " (" << r.provenance << ")";
  return os.str();
}

}  // namespace rankatlas
