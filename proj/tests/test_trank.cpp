#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "rankatlas/trank.hpp"

using namespace rankatlas;

namespace {

const HashBoundsTable& table() {
  static const HashBoundsTable t = build_bounds_table(16);
  return t;
}

std::vector<int> exact_ranks(int m, int n, int p) {
  const auto r = classify(m, n, p, table());
  EXPECT_EQ(r.kind, TrankKind::kExact) << format_result(r);
  return r.ranks;
}

}  // namespace

TEST(Classify, ThreeByThreeFamily) {
  EXPECT_EQ(exact_ranks(3, 3, 7), (std::vector<int>{7}));
  EXPECT_EQ(exact_ranks(3, 3, 6), (std::vector<int>{6}));
  EXPECT_EQ(exact_ranks(3, 3, 5), (std::vector<int>{5, 6}));
  EXPECT_EQ(exact_ranks(3, 3, 9), (std::vector<int>{9}));
  EXPECT_EQ(exact_ranks(3, 3, 12), (std::vector<int>{9}));
}

TEST(Classify, FourByFourPlural) {
  for (int k = 10; k <= 12; ++k) EXPECT_EQ(exact_ranks(4, 4, k), (std::vector<int>{k, k + 1}));
  EXPECT_EQ(exact_ranks(4, 4, 13), (std::vector<int>{13}));
}

TEST(Classify, Pencils) {
  for (int n = 2; n <= 12; ++n) {
    EXPECT_EQ(exact_ranks(2, n, n), (std::vector<int>{n, n + 1}));
    for (int p = n + 1; p <= 3 * n; ++p) EXPECT_EQ(exact_ranks(2, n, p), (std::vector<int>{std::min(p, 2 * n)}));
  }
}

TEST(Classify, MatrixCase) {
  EXPECT_EQ(exact_ranks(1, 4, 7), (std::vector<int>{4}));
  EXPECT_EQ(exact_ranks(1, 1, 1), (std::vector<int>{1}));
}

TEST(Classify, ThresholdAtFullBlock) {
  // p = (m-1)n: plural iff m#n <= n.
  EXPECT_EQ(exact_ranks(3, 4, 8), (std::vector<int>{8, 9}));  // 3#4 = 4
  EXPECT_EQ(exact_ranks(3, 5, 10), (std::vector<int>{10}));   // 3#5 = 7
  EXPECT_EQ(exact_ranks(8, 8, 56), (std::vector<int>{56, 57}));
  EXPECT_EQ(exact_ranks(5, 5, 20), (std::vector<int>{20}));
}

TEST(Classify, PermutationInvariant) {
  for (int a = 1; a <= 6; ++a) {
    for (int b = a; b <= 6; ++b) {
      for (int c = b; c <= 14; ++c) {
        std::array<int, 3> d{a, b, c};
        const auto ref = classify(a, b, c, table());
        do {
          const auto r = classify(d[0], d[1], d[2], table());
          EXPECT_EQ(format_result(r), format_result(ref));
          EXPECT_EQ(r.m, a);
          EXPECT_EQ(r.n, b);
          EXPECT_EQ(r.p, c);
        } while (std::next_permutation(d.begin(), d.end()));
      }
    }
  }
}

TEST(Classify, ResultsAreConsistent) {
  for (int m = 3; m <= 8; ++m) {
    for (int n = m; n <= 8; ++n) {
      for (int p = n; p <= m * n + 2; ++p) {
        const auto r = classify(m, n, p, table());
        const int floor_rank = std::min(p, m * n);
        switch (r.kind) {
          case TrankKind::kExact:
            ASSERT_FALSE(r.ranks.empty());
            EXPECT_TRUE(std::is_sorted(r.ranks.begin(), r.ranks.end()));
            EXPECT_LE(r.ranks.back(), m * n);
            if (p >= (m - 1) * (n - 1) + 1) EXPECT_GE(r.ranks.front(), std::min(p, m * n));
            break;
          case TrankKind::kConditional:
            EXPECT_EQ(r.ranks, (std::vector<int>{p, p + 1}));
            EXPECT_EQ(r.otherwise, (std::vector<int>{p}));
            EXPECT_FALSE(r.condition.empty());
            break;
          case TrankKind::kInterval:
            EXPECT_GE(r.lower, 1);
            if (p >= (m - 1) * (n - 1) + 1) EXPECT_GE(r.lower, floor_rank);
            if (r.upper) EXPECT_GE(*r.upper, r.lower);
            break;
        }
        EXPECT_FALSE(r.provenance.empty());
      }
    }
  }
}

TEST(Classify, GenericFloorBelowBoundary) {
  // 3 x 4 x 5 lies below the boundary 7; 3#4 = 4 < 6 so only the generic floor is known.
  const auto r = classify(3, 4, 5, table());
  EXPECT_EQ(r.kind, TrankKind::kInterval);
  EXPECT_EQ(r.lower, 6);  // ceil(60 / 10)
}

TEST(Classify, UsesHashBounds) {
  const auto r = classify(3, 3, 5, table());
  ASSERT_TRUE(r.hash_bound);
  EXPECT_EQ(r.hash_bound->lower, 4);
  EXPECT_EQ(r.hash_bound->upper, 4);
  EXPECT_FALSE(classify(2, 3, 3, table()).hash_bound);
}

TEST(Classify, ConvenienceOverloadMatches) {
  for (const auto& [m, n, p] : {std::tuple{3, 3, 5}, std::tuple{4, 4, 12}, std::tuple{5, 9, 33}, std::tuple{2, 7, 7}}) {
    EXPECT_EQ(format_result(classify(m, n, p)), format_result(classify(m, n, p, table())));
  }
}

TEST(Classify, Errors) {
  EXPECT_THROW(classify(0, 3, 3), std::invalid_argument);
  EXPECT_THROW(classify(3, -1, 3), std::invalid_argument);
  EXPECT_THROW(classify(17, 20, 30, table()), std::out_of_range);
}

TEST(FormatResult, Renderings) {
  EXPECT_EQ(format_result(classify(3, 3, 5, table())), "{5, 6} (boundary plurality + p+1 upper bound)");
  TrankResult r;
  r.kind = TrankKind::kInterval;
  r.lower = 4;
  r.provenance = "x";
  EXPECT_EQ(format_result(r), "within [4, ?] (x)");
  r.upper = 6;
  EXPECT_EQ(format_result(r), "within [4, 6] (x)");
  r.kind = TrankKind::kConditional;
  r.ranks = {8, 9};
  r.otherwise = {8};
  r.condition = "m#n <= 4";
  EXPECT_EQ(format_result(r), "{8, 9} if m#n <= 4, else {8} (x)");
}
