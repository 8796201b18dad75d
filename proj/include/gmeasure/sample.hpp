#pragma once

// Forward and exact stationary simulation of the renewal chain, and
// Monte-Carlo estimators of its conditional probabilities.
//
// Random numbers come from std::mt19937_64. Stream s of seed x is seeded with
// SplitMix64 applied to x + (s + 1) * 0x9E3779B97F4A7C15, and uniforms take the
// top 53 bits of each draw, so paths are reproducible across compilers and
// standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "gmeasure/exact.hpp"
#include "gmeasure/kernel.hpp"
#include "gmeasure/stats.hpp"

namespace gmeasure {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15ULL)) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  Symbol bernoulli(double p) { return uniform() < p ? 1 : 0; }

 private:
  std::mt19937_64 engine_;
};

struct SamplePath {
  Word symbols;
  std::uint64_t seed = 0;
  Distance left_age;
};

/// Kernel probabilities p_l for small l, falling back to the sequence beyond.
class KernelTable {
 public:
  explicit KernelTable(const PSequence& seq, Index size = 4096) : seq_(&seq) {
    table_.reserve(static_cast<std::size_t>(size));
    for (Index l = 0; l < size; ++l) table_.push_back(seq.p(l));
  }

  double p(Distance ell) const {
    if (!ell.is_infinite() && ell.value() < static_cast<Index>(table_.size())) {
      return table_[static_cast<std::size_t>(ell.value())];
    }
    return seq_->p(ell);
  }

 private:
  const PSequence* seq_;
  std::vector<double> table_;
};

/// Runs the kernel forward from a given age: a 1 resets l to 0, a 0 adds one.
inline Word run_forward(const KernelTable& kernel, Distance ell, Index length, Stream& rng) {
  Word out;
  out.reserve(static_cast<std::size_t>(length));
  for (Index t = 0; t < length; ++t) {
    const Symbol x = rng.bernoulli(kernel.p(ell));
    out.push_back(x);
    ell = x ? Distance(0) : ell.next();
  }
  return out;
}

inline SamplePath forward_sample(const PSequence& seq, Distance initial_ell, Index length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("length must be >= 1");
  const KernelTable kernel(seq, std::min<Index>(length + 1, 4096));
  Stream rng(seed);
  return {run_forward(kernel, initial_ell, length, rng), seed, initial_ell};
}

/// Exact stationary sampler: draws the age at the left edge from its certified
/// truncated law, then runs the kernel forward. Total-variation error <= tol.
class StationarySampler {
 public:
  StationarySampler(const PSequence& seq, double tol = kDefaultTol) : seq_(seq), kernel_(seq_) {
    const RenewalSeries series(seq, tol);
    cdf_.reserve(static_cast<std::size_t>(series.terms()));
    double acc = 0.0;
    for (Index i = 0; i < series.terms(); ++i) {
      acc += series.survival(i);
      cdf_.push_back(acc / series.head_sum());
    }
    cdf_.back() = 1.0;
  }

  StationarySampler(const StationarySampler&) = delete;
  StationarySampler& operator=(const StationarySampler&) = delete;

  Distance draw_age(Stream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<Index>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  }

  SamplePath sample(Index length, Stream& rng, std::uint64_t seed = 0) const {
    if (length < 1) throw std::invalid_argument("length must be >= 1");
    const Distance age = draw_age(rng);
    return {run_forward(kernel_, age, length, rng), seed, age};
  }

  const KernelTable& kernel() const { return kernel_; }
  const PSequence& sequence() const { return seq_; }

 private:
  PSequence seq_;
  KernelTable kernel_;
  std::vector<double> cdf_;
};

inline SamplePath stationary_sample(const PSequence& seq, Index length, std::uint64_t seed, double tol = kDefaultTol) {
  const StationarySampler sampler(seq, tol);
  Stream rng(seed);
  return sampler.sample(length, rng, seed);
}

// ---------------------------------------------------------------------------
// Estimators

/// Binomial estimate: `successes` out of `n_hits` conditioning events seen in
/// `n_samples` independent windows.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t n_hits = 0;
  std::int64_t n_successes = 0;

  static Estimate from_counts(std::int64_t samples, std::int64_t hits, std::int64_t successes) {
    Estimate e{0.0, 0.0, samples, hits, successes};
    if (hits > 0) {
      e.value = static_cast<double>(successes) / static_cast<double>(hits);
      e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(hits));
    }
    return e;
  }

  bool defined() const { return n_hits > 0; }

  /// Pools independent streams by adding counts.
  friend Estimate merge(const Estimate& a, const Estimate& b) {
    return from_counts(a.n_samples + b.n_samples, a.n_hits + b.n_hits, a.n_successes + b.n_successes);
  }
};

class InsufficientHits : public CertificateFailure {
 public:
  explicit InsufficientHits(std::int64_t hits)
      : CertificateFailure("insufficient hits: only " + std::to_string(hits) +
                           " conditioning events (need >= 100); raise --n-paths or shrink the window"),
        hits_(hits) {}
  std::int64_t hits() const { return hits_; }

 private:
  std::int64_t hits_;
};

constexpr std::int64_t kMinHits = 100;

namespace detail {

// Pattern with one free site: pattern[t] in {0, 1}, or -1 at the free site.
// Returns -1 when the window misses the pattern, otherwise the free symbol.
// Sites after the first mismatch are not drawn.
inline int sample_pattern(const StationarySampler& sampler, const std::vector<int>& pattern, Stream& rng) {
  Distance ell = sampler.draw_age(rng);
  int free_symbol = -1;
  for (int want : pattern) {
    const Symbol x = rng.bernoulli(sampler.kernel().p(ell));
    if (want >= 0 && x != want) return -1;
    if (want < 0) free_symbol = x;
    ell = x ? Distance(0) : ell.next();
  }
  return free_symbol;
}

inline Estimate count_pattern(const StationarySampler& sampler, const std::vector<int>& pattern,
                              std::int64_t n_paths, std::uint64_t seed, std::uint64_t stream) {
  Stream rng(seed, stream);
  std::int64_t hits = 0;
  std::int64_t zeros = 0;
  for (std::int64_t n = 0; n < n_paths; ++n) {
    const int x = sample_pattern(sampler, pattern, rng);
    if (x < 0) continue;
    ++hits;
    if (x == 0) ++zeros;
  }
  return Estimate::from_counts(n_paths, hits, zeros);
}

/// Splits n_paths over `streams` independent seeded streams, one thread each,
/// and merges the counts.
template <class PerStream>
Estimate fan_out(std::int64_t n_paths, int streams, PerStream per_stream) {
  if (streams < 1) throw std::invalid_argument("streams must be >= 1");
  std::vector<Estimate> parts(static_cast<std::size_t>(streams));
  std::vector<std::thread> workers;
  for (int s = 0; s < streams; ++s) {
    const std::int64_t share = n_paths / streams + (s < n_paths % streams ? 1 : 0);
    workers.emplace_back([&, s, share] { parts[static_cast<std::size_t>(s)] = per_stream(share, static_cast<std::uint64_t>(s)); });
  }
  for (auto& w : workers) w.join();
  Estimate total;
  for (const auto& p : parts) total = merge(total, p);
  return total;
}

inline Estimate require_hits(const Estimate& e) {
  if (e.n_hits < kMinHits) throw InsufficientHits(e.n_hits);
  return e;
}

}  // namespace detail

/// Pattern 1 0^i [.] 0^j 1 over independent stationary windows of width i+j+3;
/// estimates mu(X_0 = 0 | 1 0^i [.] 0^j 1).
inline Estimate mc_conditional(const PSequence& seq, Index i, Index j, std::int64_t n_paths, std::uint64_t seed,
                               double tol = kDefaultTol, int streams = 1) {
  if (i < 0 || j < 0) throw std::domain_error("i and j must be >= 0");
  std::vector<int> pattern(static_cast<std::size_t>(i + j + 3), 0);
  pattern.front() = 1;
  pattern[static_cast<std::size_t>(i + 1)] = -1;
  pattern.back() = 1;
  const StationarySampler sampler(seq, tol);
  return detail::require_hits(detail::fan_out(n_paths, streams, [&](std::int64_t n, std::uint64_t s) {
    return detail::count_pattern(sampler, pattern, n, seed, s);
  }));
}

/// Pattern 1 0^ell [.] over stationary windows of width ell+2; estimates
/// mu(X_0 = 0 | past with l = ell).
inline Estimate mc_one_sided(const PSequence& seq, Index ell, std::int64_t n_paths, std::uint64_t seed,
                             double tol = kDefaultTol, int streams = 1) {
  if (ell < 0) throw std::domain_error("ell must be >= 0");
  std::vector<int> pattern(static_cast<std::size_t>(ell + 2), 0);
  pattern.front() = 1;
  pattern.back() = -1;
  const StationarySampler sampler(seq, tol);
  return detail::require_hits(detail::fan_out(n_paths, streams, [&](std::int64_t n, std::uint64_t s) {
    return detail::count_pattern(sampler, pattern, n, seed, s);
  }));
}

/// Frequency of 1 over independent single-site stationary draws. Here
/// n_hits = n_samples and value estimates mu(X_0 = 1).
inline Estimate mc_marginal(const PSequence& seq, std::int64_t n_samples, std::uint64_t seed,
                            double tol = kDefaultTol, int streams = 1) {
  const StationarySampler sampler(seq, tol);
  return detail::fan_out(n_samples, streams, [&](std::int64_t n, std::uint64_t s) {
    Stream rng(seed, s);
    std::int64_t ones = 0;
    for (std::int64_t t = 0; t < n; ++t) ones += rng.bernoulli(sampler.kernel().p(sampler.draw_age(rng)));
    return Estimate::from_counts(n, n, ones);
  });
}

/// Expected number of conditioning events for mc_conditional, from the exact
/// cylinder probability of 1 0^i {0,1} 0^j 1.
inline double expected_hits(const PSequence& seq, Index i, Index j, std::int64_t n_paths, double tol = kDefaultTol) {
  const auto [left, right] = renewal_context(i, j);
  double total = 0.0;
  for (Symbol c : {Symbol{0}, Symbol{1}}) {
    CylinderSpec cyl{-static_cast<Index>(left.size()), left};
    cyl.word.push_back(c);
    cyl.word.insert(cyl.word.end(), right.begin(), right.end());
    total += cylinder_probability(seq, cyl, tol).value;
  }
  return total * static_cast<double>(n_paths);
}

// ---------------------------------------------------------------------------
// Path diagnostics

struct PathSummary {
  Index length = 0;
  Index ones = 0;
  double frequency = 0.0;
  double batch_std_error = 0.0;
  std::vector<std::int64_t> gap_counts;  // complete gaps between consecutive 1's
  stats::ChiSquare gap_fit;
};

inline PathSummary summarize_path(const PSequence& seq, const Word& symbols) {
  PathSummary s;
  s.length = static_cast<Index>(symbols.size());
  s.ones = std::count(symbols.begin(), symbols.end(), Symbol{1});
  s.frequency = s.length > 0 ? static_cast<double>(s.ones) / static_cast<double>(s.length) : 0.0;
  s.batch_std_error = stats::batch_means_se(symbols);

  Index last_one = -1;
  for (Index t = 0; t < s.length; ++t) {
    if (symbols[static_cast<std::size_t>(t)] == 0) continue;
    if (last_one >= 0) {
      const auto gap = static_cast<std::size_t>(t - last_one - 1);
      if (s.gap_counts.size() <= gap) s.gap_counts.resize(gap + 1, 0);
      ++s.gap_counts[gap];
    }
    last_one = t;
  }
  if (!s.gap_counts.empty()) {
    const auto q = GapDistribution(seq).head(static_cast<Index>(s.gap_counts.size()) - 1);
    s.gap_fit = stats::chi_square_gof(s.gap_counts, q);
  }
  return s;
}

}  // namespace gmeasure
