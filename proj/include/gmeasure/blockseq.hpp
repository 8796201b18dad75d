#pragma once

// Exact arithmetic for the block-signed harmonic sequence
//
//     v_k = (-1)^{r_k} / r_k,   r_k = min{ r >= 1 : r(r+1)/2 >= k+1 },
//
// i.e. block r holds r copies of (-1)^r / r. Every completed block sums to
// (-1)^r, so the partial sums S_i = v_0 + ... + v_{i-1} never leave [-1, 0]
// while v_k -> 0. Everything here is exact; there is no floating point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gmeasure {

using Rational = boost::multiprecision::cpp_rational;

namespace blockseq {

using Index = std::int64_t;

constexpr Index triangular(Index r) { return r * (r + 1) / 2; }

namespace detail {

inline Index isqrt(Index n) {
  auto x = static_cast<Index>(std::sqrt(static_cast<long double>(n)));
  while (x > 0 && x * x > n) --x;
  while ((x + 1) * (x + 1) <= n) ++x;
  return x;
}

// Number of completed blocks among the first i terms: largest r with T_r <= i.
inline Index completed_blocks(Index i) {
  Index r = (isqrt(8 * i + 1) - 1) / 2;
  while (triangular(r) > i) --r;
  while (triangular(r + 1) <= i) ++r;
  return r;
}

inline void require_nonnegative(Index k, const char* what) {
  if (k < 0) throw std::domain_error(std::string(what) + " must be >= 0");
}

}  // namespace detail

/// Block label r_k of term k: the unique r with r(r-1)/2 <= k < r(r+1)/2.
inline Index block_index(Index k) {
  detail::require_nonnegative(k, "k");
  return detail::completed_blocks(k) + 1;
}

/// Sign (-1)^r of every term in block r.
constexpr int block_sign(Index r) { return (r % 2 == 0) ? 1 : -1; }

inline Rational v(Index k) {
  const Index r = block_index(k);
  return Rational(block_sign(r), r);
}

/// S_i as a reduced fraction num/den held in machine integers. Denominators
/// are block labels, so this never overflows for any index we can address.
struct SmallFraction {
  Index num = 0;
  Index den = 1;

  friend bool operator==(const SmallFraction&, const SmallFraction&) = default;

  Rational exact() const { return Rational(num, den); }
};

/// S_i = sum_{k<i} v_k in closed form: with i = T_r + c (0 <= c <= r),
/// S_i = B_r + c (-1)^{r+1}/(r+1), where B_r = -1 for odd r and 0 for even r.
inline SmallFraction partial_sum_fraction(Index i) {
  detail::require_nonnegative(i, "i");
  const Index r = detail::completed_blocks(i);
  const Index completed = (r % 2 == 0) ? 0 : -1;
  const Index c = i - triangular(r);
  const Index den = r + 1;
  Index num = completed * den + block_sign(r + 1) * c;
  const Index g = std::gcd(num < 0 ? -num : num, den);
  return {num / g, den / g};
}

inline Rational partial_sum(Index i) { return partial_sum_fraction(i).exact(); }

/// sum_{k<i} (v_k - v_{k+j}) = S_i - (S_{i+j} - S_j). Zero for an empty window.
inline Rational window_sum(Index i, Index j) {
  detail::require_nonnegative(i, "i");
  detail::require_nonnegative(j, "j");
  if (i == 0 || j == 0) return Rational(0);
  return partial_sum(i) - (partial_sum(i + j) - partial_sum(j));
}

/// Sum of the length-i window starting at j: S_{i+j} - S_j.
inline Rational shifted_sum(Index i, Index j) {
  return partial_sum(i + j) - partial_sum(j);
}

// ---------------------------------------------------------------------------
// Oscillation subsequences

/// Family 1 pairs have S_i = -1; family 2 pairs have S_i = 0. Both require a
/// shift j >= 1 whose length-i window sums to zero, so window_sum(i, j) is
/// exactly -1 (family 1) or 0 (family 2).
struct SubseqPair {
  int ell = 1;
  int n = 0;
  Index i = 0;
  Index j = 0;
  Rational window_sum;
};

/// A triangular-boundary candidate for which no shift was found under the cap.
struct SkippedCandidate {
  Index i = 0;
  Index last_shift = 0;
};

struct SubseqSearch {
  std::vector<SubseqPair> pairs;
  std::vector<SkippedCandidate> skipped;
};

struct SearchOptions {
  /// Largest shift examined per candidate; defaults to 10 (i+1)^2.
  std::optional<Index> search_cap;
  /// Candidates allowed to exhaust the cap before the search fails.
  int max_skipped = 2;
};

class SearchCapExhausted : public std::runtime_error {
 public:
  SearchCapExhausted(int ell, Index i, Index last_shift)
      : std::runtime_error("shift search exhausted the cap for family " + std::to_string(ell) +
                           " at i=" + std::to_string(i) + " (last examined shift " +
                           std::to_string(last_shift) + "); raise --search-cap"),
        ell_(ell), i_(i), last_shift_(last_shift) {}

  int ell() const { return ell_; }
  Index i() const { return i_; }
  Index last_shift() const { return last_shift_; }

 private:
  int ell_;
  Index i_;
  Index last_shift_;
};

inline Index default_search_cap(Index i) { return 10 * (i + 1) * (i + 1); }

/// Smallest j in (after, cap] with S_{i+j} = S_j, or nullopt.
inline std::optional<Index> find_zero_shift(Index i, Index after, Index cap) {
  for (Index j = after + 1; j <= cap; ++j) {
    if (partial_sum_fraction(i + j) == partial_sum_fraction(j)) return j;
  }
  return std::nullopt;
}

/// The first `count` pairs of family `ell`. Candidate windows are the
/// triangular numbers T_r with r odd (ell = 1) or r even >= 2 (ell = 2); shifts
/// are strictly increasing across pairs.
inline SubseqSearch find_subsequences(int ell, int count, const SearchOptions& options = {}) {
  if (ell != 1 && ell != 2) throw std::invalid_argument("ell must be 1 or 2");
  if (count < 1) throw std::invalid_argument("count must be >= 1");

  SubseqSearch out;
  Index previous_shift = 0;
  for (Index r = (ell == 1) ? 1 : 2; static_cast<int>(out.pairs.size()) < count; r += 2) {
    const Index i = triangular(r);
    const Index cap = options.search_cap.value_or(default_search_cap(i));
    if (auto j = find_zero_shift(i, previous_shift, cap)) {
      SubseqPair pair;
      pair.ell = ell;
      pair.n = static_cast<int>(out.pairs.size()) + 1;
      pair.i = i;
      pair.j = *j;
      pair.window_sum = window_sum(i, *j);
      out.pairs.push_back(std::move(pair));
      previous_shift = *j;
      continue;
    }
    const Index last = std::max(cap, previous_shift);
    out.skipped.push_back({i, last});
    if (static_cast<int>(out.skipped.size()) > options.max_skipped) {
      throw SearchCapExhausted(ell, i, last);
    }
  }
  return out;
}

}  // namespace blockseq
}  // namespace gmeasure
