#pragma once

// Integer combinatorics of nonsingular bilinear maps: dyadic helpers, the
// Stiefel-Hopf criterion, the Hurwitz-Radon function and a fixed-point
// engine bounding m#n, the least l admitting a nonsingular bilinear map
// R^m x R^n -> R^l.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankatlas {

/// Number of ones in the binary expansion of n. Throws std::domain_error for n < 1.
int alpha(std::int64_t n);

/// True iff a and b have no common set bit.
bool bit_disjoint(std::uint64_t a, std::uint64_t b) noexcept;

/// #{j >= 0 : bit j of (k-h) is 0 and bit j of k differs from bit j of h}.
/// Requires k > h >= 0, otherwise std::domain_error.
int tau(std::int64_t k, std::int64_t h);

/// Hurwitz-Radon number: for n = (2a+1) 2^(b+4c), 0 <= b < 4, returns 2^b + 8c.
std::int64_t rho(std::int64_t n);

/// Stiefel-Hopf criterion H(r, s, n): C(n, k) is even for every n-s < k < r.
/// Parity uses Lucas: C(n, k) is odd iff k is a bit-submask of n.
bool stiefel_hopf(int r, int s, int n);

/// r o s by scanning n = max(r, s), max(r, s)+1, ... for the first H(r, s, n).
int circ_direct(int r, int s);
/// r o s by the ceiling-halving recursion.
int circ_recursive(int r, int s);
/// r o s; evaluates both routes and throws std::logic_error if they differ.
int circ(int r, int s);

/// Which fact produced a bound.
enum class BoundRule {
  kStiefelHopf,       // lower = r o s
  kTrivial,           // upper = m + n - 1
  kHurwitzRadon,      // n # rho(n) <= n
  kAdams,             // n # (rho(n)+1) >= n+1
  kBitDisjoint,       // r # s = r+s-1 when r-1, s-1 bit-disjoint
  kNotBitDisjoint,    // r # s <= r+s-2 otherwise
  kComposition,       // (mu)#(nv) <= (m+n-1)(u#v)
  kHypercomplex,      // km # kn <= k(m+n-1), k in {1,2,4,8}
  kProjectiveSpace,   // n # n = 2n-2 for n = 2^a + 1
  kCohen,             // (n+1)#(n+1) <= 2n - alpha(n) + 1
  kDavis,             // (2n+alpha(n))#(2n+alpha(n)) >= 4n - 2alpha(n) + 2
  kDavisMahowald,     // diagonal lower bounds for alpha(n) = 2, 3
  kMilgram,           // (n+1)#(m+1) upper bound for odd n >= m
  kLam,               // d(h+1) # (d(k-h)+tau(k,h)) <= dk
  kLamDoubling,       // (n+1) # (n+tau(2n,n)) <= 2n
  kRestriction,       // m'#n' <= m#n for m' <= m, n' <= n
};

std::string_view to_string(BoundRule rule);
/// Inverse of to_string; throws std::invalid_argument on unknown tags.
BoundRule bound_rule_from_string(std::string_view tag);

struct HashBound {
  int lower = 0;
  int upper = 0;
  BoundRule lower_rule = BoundRule::kStiefelHopf;
  BoundRule upper_rule = BoundRule::kTrivial;

  [[nodiscard]] bool exact() const noexcept { return lower == upper; }
  friend bool operator==(const HashBound&, const HashBound&) = default;
};

/// Bounds on m#n for 1 <= m, n <= max_dim. Symmetric by construction.
class HashBoundsTable {
 public:
  HashBoundsTable() = default;
  explicit HashBoundsTable(int max_dim);

  [[nodiscard]] int max_dim() const noexcept { return max_dim_; }
  [[nodiscard]] bool contains(int m, int n) const noexcept {
    return m >= 1 && n >= 1 && m <= max_dim_ && n <= max_dim_;
  }
  /// Throws std::out_of_range outside [1, max_dim]^2.
  [[nodiscard]] const HashBound& at(int m, int n) const;
  HashBound& mutable_at(int m, int n);

  friend bool operator==(const HashBoundsTable&, const HashBoundsTable&) = default;

 private:
  [[nodiscard]] std::size_t slot(int m, int n) const;

  int max_dim_ = 0;
  std::vector<HashBound> entries_;  // canonical (min, max) pairs, row-major
};

/// Raised when a rule would push lower above upper.
class BoundsContradiction : public std::runtime_error {
 public:
  BoundsContradiction(int m, int n, int lower, BoundRule lower_rule, int upper,
                      BoundRule upper_rule);
  int m, n, lower, upper;
  BoundRule lower_rule, upper_rule;
};

struct BoundsOptions {
  /// The Davis diagonal bound as quoted contradicts 8#8 = 8 (octonions) at
  /// n = 3, so it is off unless explicitly requested.
  bool include_davis = false;
  /// The Milgram bound off the diagonal contradicts trivial lower bounds
  /// (it gives 6#4 <= 5); by default it is applied for n = m only.
  bool milgram_off_diagonal = false;
};

/// Seeds and closes the table under every enabled rule until no bound
/// changes. Throws BoundsContradiction if the rules are inconsistent and
/// std::invalid_argument if max_dim < 2.
HashBoundsTable build_bounds_table(int max_dim, const BoundsOptions& options = {});

}  // namespace rankatlas
