#include "rankatlas/hopf.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <utility>

namespace rankatlas {

int alpha(std::int64_t n) {
  if (n < 1) throw std::domain_error("alpha: argument must be positive");
  return std::popcount(static_cast<std::uint64_t>(n));
}

bool bit_disjoint(std::uint64_t a, std::uint64_t b) noexcept { return (a & b) == 0; }

int tau(std::int64_t k, std::int64_t h) {
  if (h < 0 || k <= h) throw std::domain_error("tau: requires k > h >= 0");
  const auto diff = static_cast<std::uint64_t>(k - h);
  const auto flips = static_cast<std::uint64_t>(k) ^ static_cast<std::uint64_t>(h);
  return std::popcount(~diff & flips);
}

std::int64_t rho(std::int64_t n) {
  if (n < 1) throw std::domain_error("rho: argument must be positive");
  const int twos = std::countr_zero(static_cast<std::uint64_t>(n));
  const int b = twos % 4;
  const int c = twos / 4;
  return (std::int64_t{1} << b) + 8 * c;
}

namespace {

bool binomial_odd(int n, int k) { return k >= 0 && k <= n && (k & ~n) == 0; }

}  // namespace

bool stiefel_hopf(int r, int s, int n) {
  for (int k = std::max(n - s + 1, 0); k < r; ++k) {
    if (binomial_odd(n, k)) return false;
  }
  return true;
}

int circ_direct(int r, int s) {
  if (r < 1 || s < 1) throw std::domain_error("circ: arguments must be positive");
  // H(r, s, r+s-1) always holds (the range n-s < k < r is empty there).
  for (int n = std::max(r, s);; ++n) {
    if (stiefel_hopf(r, s, n)) return n;
  }
}

int circ_recursive(int r, int s) {
  if (r < 1 || s < 1) throw std::domain_error("circ: arguments must be positive");
  if (r == 1 || s == 1) return std::max(r, s);
  const int rh = (r + 1) / 2;
  const int sh = (s + 1) / 2;
  const int half = circ_recursive(rh, sh);
  if (r % 2 == 1 && s % 2 == 1 && half == rh + sh - 1) return 2 * half - 1;
  return 2 * half;
}

int circ(int r, int s) {
  const int direct = circ_direct(r, s);
  if (direct != circ_recursive(r, s)) {
    throw std::logic_error("circ: direct search and recursion disagree at (" + std::to_string(r) +
                           "," + std::to_string(s) + ")");
  }
  return direct;
}

namespace {

constexpr std::array<std::pair<BoundRule, std::string_view>, 16> kRuleNames{{
    {BoundRule::kStiefelHopf, "stiefel_hopf"},
    {BoundRule::kTrivial, "trivial"},
    {BoundRule::kHurwitzRadon, "hurwitz_radon"},
    {BoundRule::kAdams, "adams"},
    {BoundRule::kBitDisjoint, "bit_disjoint"},
    {BoundRule::kNotBitDisjoint, "not_bit_disjoint"},
    {BoundRule::kComposition, "composition"},
    {BoundRule::kHypercomplex, "hypercomplex"},
    {BoundRule::kProjectiveSpace, "projective_space"},
    {BoundRule::kCohen, "cohen"},
    {BoundRule::kDavis, "davis"},
    {BoundRule::kDavisMahowald, "davis_mahowald"},
    {BoundRule::kMilgram, "milgram"},
    {BoundRule::kLam, "lam"},
    {BoundRule::kLamDoubling, "lam_doubling"},
    {BoundRule::kRestriction, "restriction"},
}};

}  // namespace

std::string_view to_string(BoundRule rule) {
  for (const auto& [r, name] : kRuleNames)
    if (r == rule) return name;
  return "unknown";
}

BoundRule bound_rule_from_string(std::string_view tag) {
  for (const auto& [r, name] : kRuleNames)
    if (name == tag) return r;
  throw std::invalid_argument("unknown bound rule tag '" + std::string(tag) + "'");
}

HashBoundsTable::HashBoundsTable(int max_dim)
    : max_dim_(max_dim), entries_(static_cast<std::size_t>(max_dim) * max_dim) {
  if (max_dim < 1) throw std::invalid_argument("HashBoundsTable: max_dim must be positive");
}

std::size_t HashBoundsTable::slot(int m, int n) const {
  if (!contains(m, n)) {
    throw std::out_of_range("HashBoundsTable: (" + std::to_string(m) + "," + std::to_string(n) +
                            ") outside 1.." + std::to_string(max_dim_));
  }
  const int lo = std::min(m, n) - 1;
  const int hi = std::max(m, n) - 1;
  return static_cast<std::size_t>(lo) * max_dim_ + hi;
}

const HashBound& HashBoundsTable::at(int m, int n) const { return entries_[slot(m, n)]; }
HashBound& HashBoundsTable::mutable_at(int m, int n) { return entries_[slot(m, n)]; }

BoundsContradiction::BoundsContradiction(int m_, int n_, int lower_, BoundRule lower_rule_,
                                         int upper_, BoundRule upper_rule_)
    : std::runtime_error("contradictory bounds for " + std::to_string(m_) + "#" +
                         std::to_string(n_) + ": lower " + std::to_string(lower_) + " (" +
                         std::string(to_string(lower_rule_)) + ") > upper " +
                         std::to_string(upper_) + " (" + std::string(to_string(upper_rule_)) +
                         ")"),
      m(m_),
      n(n_),
      lower(lower_),
      upper(upper_),
      lower_rule(lower_rule_),
      upper_rule(upper_rule_) {}

namespace {

class BoundsEngine {
 public:
  BoundsEngine(int max_dim, const BoundsOptions& options)
      : table_(max_dim), options_(options), max_(max_dim) {}

  HashBoundsTable run() {
    seed();
    do {
      changed_ = false;
      apply_static_rules();
      apply_composition();
      apply_restriction();
    } while (changed_);
    return std::move(table_);
  }

 private:
  bool in_range(std::int64_t m, std::int64_t n) const {
    return m >= 1 && n >= 1 && m <= max_ && n <= max_;
  }

  void lower(std::int64_t m, std::int64_t n, std::int64_t value, BoundRule rule) {
    if (!in_range(m, n)) return;
    auto& e = table_.mutable_at(static_cast<int>(m), static_cast<int>(n));
    if (value <= e.lower) return;
    e.lower = static_cast<int>(value);
    e.lower_rule = rule;
    changed_ = true;
    check(m, n, e);
  }

  void upper(std::int64_t m, std::int64_t n, std::int64_t value, BoundRule rule) {
    if (!in_range(m, n)) return;
    auto& e = table_.mutable_at(static_cast<int>(m), static_cast<int>(n));
    if (value >= e.upper) return;
    e.upper = static_cast<int>(value);
    e.upper_rule = rule;
    changed_ = true;
    check(m, n, e);
  }

  static void check(std::int64_t m, std::int64_t n, const HashBound& e) {
    if (e.lower > e.upper) {
      throw BoundsContradiction(static_cast<int>(m), static_cast<int>(n), e.lower, e.lower_rule,
                                e.upper, e.upper_rule);
    }
  }

  void seed() {
    for (int m = 1; m <= max_; ++m) {
      for (int n = m; n <= max_; ++n) {
        auto& e = table_.mutable_at(m, n);
        e.lower = circ(m, n);
        e.lower_rule = BoundRule::kStiefelHopf;
        e.upper = m + n - 1;
        e.upper_rule = BoundRule::kTrivial;
      }
    }
  }

  static int milgram_k(std::int64_t n) {
    switch (n % 8) {
      case 1: return 0;
      case 3: return 1;
      case 5: return 1;
      default: return 4;  // n = 7 mod 8
    }
  }

  void apply_static_rules() {
    for (int n = 1; n <= max_; ++n) {
      const auto r = rho(n);
      upper(n, r, n, BoundRule::kHurwitzRadon);
      lower(n, r + 1, n + 1, BoundRule::kAdams);
    }

    for (int r = 1; r <= max_; ++r) {
      for (int s = r; s <= max_; ++s) {
        if (bit_disjoint(r - 1, s - 1)) {
          lower(r, s, r + s - 1, BoundRule::kBitDisjoint);
        } else {
          upper(r, s, r + s - 2, BoundRule::kNotBitDisjoint);
        }
      }
    }

    for (int a = 0; (std::int64_t{1} << a) + 1 <= max_; ++a) {
      const std::int64_t n = (std::int64_t{1} << a) + 1;
      lower(n, n, 2 * n - 2, BoundRule::kProjectiveSpace);
    }

    for (std::int64_t n = 1; n + 1 <= max_; ++n) {
      upper(n + 1, n + 1, 2 * n - alpha(n) + 1, BoundRule::kCohen);
    }

    if (options_.include_davis) {
      for (std::int64_t n = 1; 2 * n + alpha(n) <= max_; ++n) {
        const auto d = 2 * n + alpha(n);
        lower(d, d, 4 * n - 2 * alpha(n) + 2, BoundRule::kDavis);
      }
    }

    for (std::int64_t n = 1; 8 * n + 9 <= max_; ++n) {
      if (alpha(n) == 2) {
        lower(8 * n + 9, 8 * n + 9, 16 * n + 6, BoundRule::kDavisMahowald);
        lower(16 * n + 12, 16 * n + 12, 32 * n + 14, BoundRule::kDavisMahowald);
      } else if (alpha(n) == 3) {
        lower(8 * n + 10, 8 * n + 10, 16 * n + 1, BoundRule::kDavisMahowald);
        lower(8 * n + 11, 8 * n + 11, 16 * n + 4, BoundRule::kDavisMahowald);
      }
    }

    for (std::int64_t n = 1; n + 1 <= max_; n += 2) {
      for (std::int64_t m = 1; m <= n; m += 2) {
        if (m != n && !options_.milgram_off_diagonal) continue;
        const int gap = std::popcount(static_cast<std::uint64_t>(n - m));
        const auto value = n + m + 1 - (alpha(n) + gap + std::min(milgram_k(n), milgram_k(m)));
        upper(n + 1, m + 1, value, BoundRule::kMilgram);
      }
    }

    for (const std::int64_t d : {1, 2, 4, 8}) {
      for (std::int64_t h = 0; d * (h + 1) <= max_; ++h) {
        for (std::int64_t k = h + 1; d * (k - h) <= max_; ++k) {
          lower_or_skip_lam(d, h, k);
        }
      }
      for (std::int64_t k = 1; d * k <= max_; ++k) {
        upper(d, d * k, d * k, BoundRule::kHypercomplex);  // d*1 # d*k <= d*k
      }
    }

    for (std::int64_t n = 1; n + 1 <= max_; ++n) {
      upper(n + 1, n + tau(2 * n, n), 2 * n, BoundRule::kLamDoubling);
    }

    for (const std::int64_t k : {1, 2, 4, 8}) {
      for (std::int64_t m = 1; k * m <= max_; ++m)
        for (std::int64_t n = 1; k * n <= max_; ++n)
          upper(k * m, k * n, k * (m + n - 1), BoundRule::kHypercomplex);
    }
  }

  void lower_or_skip_lam(std::int64_t d, std::int64_t h, std::int64_t k) {
    upper(d * (h + 1), d * (k - h) + tau(k, h), d * k, BoundRule::kLam);
  }

  void apply_composition() {
    for (int u = 1; u <= max_; ++u) {
      for (int v = 1; v <= max_; ++v) {
        const int base = table_.at(u, v).upper;
        for (int m = 1; m * u <= max_; ++m) {
          for (int n = 1; n * v <= max_; ++n) {
            if (m == 1 && n == 1) continue;
            upper(m * u, n * v, static_cast<std::int64_t>(m + n - 1) * base,
                  BoundRule::kComposition);
          }
        }
      }
    }
  }

  void apply_restriction() {
    // Lower bounds grow with the arguments, upper bounds shrink toward smaller ones.
    for (int m = 1; m <= max_; ++m) {
      for (int n = 1; n <= max_; ++n) {
        if (m > 1) lower(m, n, table_.at(m - 1, n).lower, BoundRule::kRestriction);
        if (n > 1) lower(m, n, table_.at(m, n - 1).lower, BoundRule::kRestriction);
      }
    }
    for (int m = max_; m >= 1; --m) {
      for (int n = max_; n >= 1; --n) {
        if (m < max_) upper(m, n, table_.at(m + 1, n).upper, BoundRule::kRestriction);
        if (n < max_) upper(m, n, table_.at(m, n + 1).upper, BoundRule::kRestriction);
      }
    }
  }

  HashBoundsTable table_;
  BoundsOptions options_;
  int max_;
  bool changed_ = false;
};

}  // namespace

HashBoundsTable build_bounds_table(int max_dim, const BoundsOptions& options) {
  if (max_dim < 2) throw std::invalid_argument("build_bounds_table: max_dim must be at least 2");
  return BoundsEngine(max_dim, options).run();
}

}  // namespace rankatlas
