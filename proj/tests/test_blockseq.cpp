#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "gmeasure/blockseq.hpp"

namespace bs = gmeasure::blockseq;
using gmeasure::Rational;

namespace {

// r_k straight from its definition: the first i >= 1 with 1 + 2 + ... + i >= k + 1.
bs::Index block_index_by_definition(bs::Index k) {
  bs::Index i = 1;
  bs::Index sum = 1;
  while (sum < k + 1) sum += ++i;
  return i;
}

// Term-by-term rational sums, independent of the closed form.
std::vector<Rational> naive_partial_sums(bs::Index n) {
  std::vector<Rational> s{Rational(0)};
  for (bs::Index k = 0; k < n; ++k) {
    const bs::Index r = block_index_by_definition(k);
    s.push_back(s.back() + Rational(r % 2 == 0 ? 1 : -1, r));
  }
  return s;
}

}  // namespace

TEST(BlockIndex, ListedTerms) {
  EXPECT_EQ(bs::block_index(0), 1);
  EXPECT_EQ(bs::block_index(6), 4);
  EXPECT_EQ(bs::block_index(14), 5);
}

TEST(BlockIndex, MatchesInfDefinition) {
  for (bs::Index k = 0; k < 20000; ++k) ASSERT_EQ(bs::block_index(k), block_index_by_definition(k)) << k;
  // Far out, check the bracketing property instead.
  for (bs::Index k : {bs::Index{999'999'999}, bs::Index{123'456'789'012}, bs::Index{4'000'000'000'000}}) {
    const bs::Index r = bs::block_index(k);
    EXPECT_LE(r * (r - 1) / 2, k);
    EXPECT_LT(k, r * (r + 1) / 2);
  }
}

TEST(BlockIndex, RejectsNegative) { EXPECT_THROW(bs::block_index(-1), std::domain_error); }

TEST(V, FirstFifteenTerms) {
  const std::vector<Rational> listed{Rational(-1),    Rational(1, 2),  Rational(1, 2),  Rational(-1, 3), Rational(-1, 3),
                                     Rational(-1, 3), Rational(1, 4),  Rational(1, 4),  Rational(1, 4),  Rational(1, 4),
                                     Rational(-1, 5), Rational(-1, 5), Rational(-1, 5), Rational(-1, 5), Rational(-1, 5)};
  for (std::size_t k = 0; k < listed.size(); ++k) EXPECT_EQ(bs::v(static_cast<bs::Index>(k)), listed[k]) << k;
}

TEST(V, MagnitudeIsReciprocalBlockAndShrinks) {
  bs::Index prev = 1;
  for (bs::Index k = 0; k < 5000; ++k) {
    const bs::Index r = bs::block_index(k);
    EXPECT_EQ(abs(bs::v(k)), Rational(1, r));
    EXPECT_GE(r, prev);
    prev = r;
  }
  EXPECT_EQ(bs::block_index(bs::triangular(1000)), 1001);
}

TEST(PartialSum, Examples) {
  EXPECT_EQ(bs::partial_sum(0), Rational(0));
  EXPECT_EQ(bs::partial_sum(1), Rational(-1));
  EXPECT_EQ(bs::partial_sum(3), Rational(0));
}

TEST(PartialSum, AgreesWithNaiveSummation) {
  const auto naive = naive_partial_sums(6000);
  for (bs::Index i = 0; i <= 6000; ++i) ASSERT_EQ(bs::partial_sum(i), naive[static_cast<std::size_t>(i)]) << i;
}

TEST(PartialSum, StaysInsideMinusOneZero) {
  for (bs::Index i = 1; i < 50000; ++i) {
    const Rational s = bs::partial_sum(i);
    ASSERT_GE(s, Rational(-1));
    ASSERT_LE(s, Rational(0));
  }
}

TEST(PartialSum, TriangularBoundaries) {
  for (bs::Index r = 1; r < 2000; ++r) {
    EXPECT_EQ(bs::partial_sum(bs::triangular(r)), r % 2 ? Rational(-1) : Rational(0)) << r;
  }
}

TEST(WindowSum, Examples) {
  EXPECT_EQ(bs::window_sum(7, 0), Rational(0));
  EXPECT_EQ(bs::window_sum(0, 5), Rational(0));
  EXPECT_EQ(bs::window_sum(1, 1), Rational(-3, 2));
}

TEST(WindowSum, AgreesWithTermByTerm) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<bs::Index> pick(0, 400);
  for (int draw = 0; draw < 300; ++draw) {
    const bs::Index i = pick(rng) + 1;
    const bs::Index j = pick(rng);
    Rational direct(0);
    for (bs::Index k = 0; k < i; ++k) direct += bs::v(k) - bs::v(k + j);
    ASSERT_EQ(bs::window_sum(i, j), direct) << i << "," << j;
  }
}

TEST(FindSubsequences, FamilyOneSkipsTheLengthOneWindow) {
  // A length-1 window is a single nonzero term, so i = 1 never has a shift.
  const auto search = bs::find_subsequences(1, 3);
  ASSERT_EQ(search.pairs.size(), 3u);
  ASSERT_EQ(search.skipped.size(), 1u);
  EXPECT_EQ(search.skipped[0].i, 1);

  std::vector<bs::Index> is;
  for (const auto& p : search.pairs) is.push_back(p.i);
  EXPECT_EQ(is, (std::vector<bs::Index>{6, 15, 28}));
  for (const auto& p : search.pairs) EXPECT_EQ(bs::partial_sum(p.i), Rational(-1));
}

TEST(FindSubsequences, ShiftsMatchBruteForce) {
  const auto naive = naive_partial_sums(20000);
  for (int ell : {1, 2}) {
    const auto search = bs::find_subsequences(ell, 6);
    bs::Index previous = 0;
    for (const auto& p : search.pairs) {
      bs::Index j = previous + 1;
      while (naive[static_cast<std::size_t>(p.i + j)] - naive[static_cast<std::size_t>(j)] != 0) ++j;
      EXPECT_EQ(p.j, j) << "ell=" << ell << " i=" << p.i;
      previous = j;
    }
  }
}

TEST(FindSubsequences, FirstPairsOfBothFamilies) {
  const auto one = bs::find_subsequences(1, 1);
  EXPECT_EQ(one.pairs[0].window_sum, Rational(-1));
  EXPECT_EQ(bs::window_sum(one.pairs[0].i, one.pairs[0].j), Rational(-1));

  const auto two = bs::find_subsequences(2, 1);
  EXPECT_EQ(bs::partial_sum(two.pairs[0].i), Rational(0));
  EXPECT_EQ(two.pairs[0].i, 10);
  EXPECT_EQ(two.pairs[0].j, 8);
}

TEST(FindSubsequences, IdentitiesHoldExactly) {
  for (int ell : {1, 2}) {
    const auto search = bs::find_subsequences(ell, 10);
    ASSERT_EQ(search.pairs.size(), 10u);
    bs::Index prev_i = 0;
    bs::Index prev_j = 0;
    for (const auto& p : search.pairs) {
      EXPECT_EQ(bs::partial_sum(p.i), ell == 1 ? Rational(-1) : Rational(0));
      EXPECT_EQ(bs::shifted_sum(p.i, p.j), Rational(0));
      EXPECT_EQ(p.window_sum, ell == 1 ? Rational(-1) : Rational(0));
      EXPECT_GT(p.i, prev_i);
      EXPECT_GT(p.j, prev_j);
      prev_i = p.i;
      prev_j = p.j;
    }
  }
}

TEST(FindSubsequences, CapExhaustionReportsLastShift) {
  bs::SearchOptions tight;
  tight.search_cap = 1;
  tight.max_skipped = 0;
  try {
    bs::find_subsequences(2, 1, tight);
    FAIL() << "expected SearchCapExhausted";
  } catch (const bs::SearchCapExhausted& e) {
    EXPECT_EQ(e.ell(), 2);
    EXPECT_EQ(e.i(), 3);
    EXPECT_EQ(e.last_shift(), 1);
  }
}

TEST(FindSubsequences, RejectsBadArguments) {
  EXPECT_THROW(bs::find_subsequences(3, 1), std::invalid_argument);
  EXPECT_THROW(bs::find_subsequences(1, 0), std::invalid_argument);
}
