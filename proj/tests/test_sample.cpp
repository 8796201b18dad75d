#include <gtest/gtest.h>

#include <cmath>

#include "gmeasure/exact.hpp"
#include "gmeasure/sample.hpp"
#include "gmeasure/stats.hpp"

using namespace gmeasure;

namespace {

PSequence osc(double p_inf = 0.5, double xi = 2.0) { return PSequence::oscillating(OscillatingParams::make(p_inf, xi)); }

double z_of(const Estimate& e, double exact) { return (e.value - exact) / e.std_error; }

}  // namespace

TEST(Stream, Reproducible) {
  Stream a(42), b(42), c(42, 1);
  bool differs = false;
  for (int t = 0; t < 100; ++t) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(ForwardSample, ConstantFrequency) {
  const PSequence seq = PSequence::constant(0.3);
  const auto path = forward_sample(seq, Distance(0), 1'000'000, 3);
  const auto ones = std::count(path.symbols.begin(), path.symbols.end(), Symbol{1});
  const double freq = static_cast<double>(ones) / 1e6;
  EXPECT_LT(std::abs(freq - 0.3) / std::sqrt(0.3 * 0.7 / 1e6), 4.0);
}

TEST(ForwardSample, FirstSymbolFollowsKernel) {
  const PSequence seq = osc();
  const int n = 200000;
  int ones = 0;
  for (int s = 0; s < n; ++s) ones += forward_sample(seq, Distance(0), 1, static_cast<std::uint64_t>(s)).symbols[0];
  const double p0 = seq.p(0);
  EXPECT_LT(std::abs(ones / double(n) - p0) / std::sqrt(p0 * (1 - p0) / n), 4.0);
}

TEST(ForwardSample, InfiniteAgePropagates) {
  // Started at l = infinity, every symbol up to the first 1 uses p_inf.
  const PSequence seq = PSequence::custom_finite_tail({0.99, 0.99, 0.99}, 0.2);
  const int n = 50000;
  int first_ones = 0;
  for (int s = 0; s < n; ++s) {
    const auto path = forward_sample(seq, Distance::infinity(), 1, static_cast<std::uint64_t>(s));
    EXPECT_TRUE(path.left_age.is_infinite());
    first_ones += path.symbols[0];
  }
  EXPECT_LT(std::abs(first_ones / double(n) - 0.2) / std::sqrt(0.2 * 0.8 / n), 4.0);
}

TEST(ForwardSample, Deterministic) {
  const PSequence seq = osc();
  EXPECT_EQ(forward_sample(seq, Distance(3), 500, 11).symbols, forward_sample(seq, Distance(3), 500, 11).symbols);
  EXPECT_NE(forward_sample(seq, Distance(3), 500, 11).symbols, forward_sample(seq, Distance(3), 500, 12).symbols);
  EXPECT_THROW(forward_sample(seq, Distance(0), 0, 1), std::invalid_argument);
}

TEST(StationarySample, Reproducible) {
  const PSequence seq = osc();
  const auto a = stationary_sample(seq, 1000, 5);
  const auto b = stationary_sample(seq, 1000, 5);
  EXPECT_EQ(a.symbols, b.symbols);
  EXPECT_EQ(a.left_age, b.left_age);
  EXPECT_EQ(a.seed, 5u);
}

TEST(StationarySample, OneFrequencyMatchesMarginal) {
  const PSequence seq = osc();
  const Estimate e = mc_marginal(seq, 1'000'000, 17);
  EXPECT_LT(std::abs(z_of(e, marginal_one(seq).value)), 4.0);
}

TEST(StationarySample, AgeAtMidpointFitsAgeDistribution) {
  const PSequence seq = osc(0.3, 1.8);
  const StationarySampler sampler(seq);
  Stream rng(8);
  const int paths = 100000;
  const Index width = 21;
  std::vector<std::int64_t> counts(60, 0);
  for (int n = 0; n < paths; ++n) {
    const auto path = sampler.sample(width, rng);
    // l at the midpoint site 10, reading back into the left edge age if needed.
    Index ell = 0;
    Index t = 9;
    while (t >= 0 && path.symbols[static_cast<std::size_t>(t)] == 0) {
      ++ell;
      --t;
    }
    if (t < 0) ell += path.left_age.value();
    ++counts[static_cast<std::size_t>(std::min<Index>(ell, 59))];
  }
  std::vector<double> probs;
  double mass = 0.0;
  for (Index i = 0; i < 59; ++i) {
    probs.push_back(age_distribution(seq, i).value);
    mass += probs.back();
  }
  probs.push_back(1.0 - mass);
  const auto fit = stats::chi_square_gof(counts, probs);
  EXPECT_GT(fit.p_value, 0.01) << "chi2=" << fit.statistic << " dof=" << fit.dof;
}

TEST(StationarySample, ConstantFamilyIsIid) {
  // Pair counts at sites (0, 1) for the constant family follow the product law.
  const PSequence seq = PSequence::constant(0.3);
  const StationarySampler sampler(seq);
  Stream rng(4);
  std::vector<std::int64_t> counts(4, 0);
  for (int n = 0; n < 100000; ++n) {
    const auto w = sampler.sample(2, rng).symbols;
    ++counts[static_cast<std::size_t>(2 * w[0] + w[1])];
  }
  const auto fit = stats::chi_square_gof(counts, {0.49, 0.21, 0.21, 0.09});
  EXPECT_GT(fit.p_value, 0.01);
}

TEST(StationarySample, SubwindowLawDoesNotDependOnOffset) {
  // Each path contributes one subwindow, at offset n % offsets, so rows are independent.
  const PSequence seq = osc();
  const StationarySampler sampler(seq);
  Stream rng(21);
  const Index offsets = 5;
  for (Index w = 1; w <= 4; ++w) {
    std::vector<std::vector<std::int64_t>> table(static_cast<std::size_t>(offsets),
                                                 std::vector<std::int64_t>(std::size_t{1} << w, 0));
    for (int n = 0; n < 200000; ++n) {
      const Index o = n % offsets;
      const auto path = sampler.sample(offsets + w, rng).symbols;
      std::size_t code = 0;
      for (Index t = 0; t < w; ++t) code = 2 * code + path[static_cast<std::size_t>(o + t)];
      ++table[static_cast<std::size_t>(o)][code];
    }
    const auto test = stats::chi_square_homogeneity(table);
    EXPECT_GT(test.p_value, 0.01) << "w=" << w << " chi2=" << test.statistic << " dof=" << test.dof;
  }
}

TEST(McConditional, ConstantFamily) {
  const Estimate e = mc_conditional(PSequence::constant(0.3), 1, 1, 200000, 1);
  EXPECT_LT(std::abs(z_of(e, 0.7)), 4.0);
}

TEST(McConditional, OscillatingAgreesWithExact) {
  const PSequence seq = osc();
  for (auto [i, j] : {std::pair<Index, Index>{2, 2}, {0, 0}, {1, 3}}) {
    const Estimate e = mc_conditional(seq, i, j, 1'000'000, 9);
    EXPECT_GE(e.n_hits, kMinHits);
    EXPECT_LT(std::abs(z_of(e, two_sided_conditional(seq, i, j))), 4.0) << i << "," << j;
  }
}

TEST(McConditional, InsufficientHits) {
  EXPECT_THROW(mc_conditional(osc(), 6, 6, 1000, 1), InsufficientHits);
  EXPECT_LT(expected_hits(osc(), 6, 6, 1000), 100.0);
}

TEST(McConditional, ReproducibleAndStreamsAgree) {
  const PSequence seq = osc();
  const Estimate a = mc_conditional(seq, 1, 1, 200000, 77);
  const Estimate b = mc_conditional(seq, 1, 1, 200000, 77);
  EXPECT_EQ(a.n_hits, b.n_hits);
  EXPECT_EQ(a.n_successes, b.n_successes);

  const Estimate serial = mc_conditional(seq, 1, 1, 400000, 3);
  const Estimate parallel = mc_conditional(seq, 1, 1, 400000, 3, kDefaultTol, 4);
  EXPECT_EQ(parallel.n_samples, 400000);
  const double se = std::hypot(serial.std_error, parallel.std_error);
  EXPECT_LT(std::abs(serial.value - parallel.value) / se, 4.0);

  const Estimate again = mc_conditional(seq, 1, 1, 400000, 3, kDefaultTol, 4);
  EXPECT_EQ(again.n_successes, parallel.n_successes);
}

TEST(McOneSided, AgreesWithKernel) {
  const PSequence seq = osc();
  for (Index ell : {0, 1, 2, 5}) {
    const Estimate e = mc_one_sided(seq, ell, 500000, 13);
    EXPECT_LT(std::abs(z_of(e, one_sided_conditional(seq, ell))), 4.0) << ell;
  }
  const Estimate c = mc_one_sided(PSequence::constant(0.3), 3, 200000, 2);
  EXPECT_LT(std::abs(z_of(c, 0.7)), 4.0);
}

TEST(McOneSided, DeepContextsAreTooRare) {
  EXPECT_THROW(mc_one_sided(osc(), 30, 100000, 1), InsufficientHits);
}

TEST(McConditional, ConsistencyAcrossSeeds) {
  const PSequence seq = osc();
  const double exact = two_sided_conditional(seq, 1, 2);
  const double m = marginal_one(seq).value;
  int passed = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const bool cond_ok = std::abs(z_of(mc_conditional(seq, 1, 2, 20000, seed), exact)) <= 4.0;
    const bool marg_ok = std::abs(z_of(mc_marginal(seq, 20000, seed), m)) <= 4.0;
    passed += cond_ok && marg_ok;
  }
  EXPECT_GE(passed, 99);
}

TEST(PathSummary, GapHistogramFitsGapDistribution) {
  const PSequence seq = osc();
  const auto path = stationary_sample(seq, 400000, 31);
  const PathSummary s = summarize_path(seq, path.symbols);
  EXPECT_EQ(s.length, 400000);
  EXPECT_GT(s.gap_fit.dof, 3);
  EXPECT_GT(s.gap_fit.p_value, 0.01);
  EXPECT_LT(std::abs(s.frequency - marginal_one(seq).value) / s.batch_std_error, 4.0);
}

TEST(Estimate, MergeAddsCounts) {
  const Estimate a = Estimate::from_counts(10, 4, 1);
  const Estimate b = Estimate::from_counts(20, 6, 4);
  const Estimate m = merge(a, b);
  EXPECT_EQ(m.n_samples, 30);
  EXPECT_EQ(m.n_hits, 10);
  EXPECT_DOUBLE_EQ(m.value, 0.5);
  EXPECT_FALSE(Estimate::from_counts(10, 0, 0).defined());
}
