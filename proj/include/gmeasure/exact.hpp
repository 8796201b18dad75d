#pragma once

// Conditional probabilities of the stationary renewal chain mu compatible with
// the kernel, in closed form, plus an independent route through certified
// cylinder probabilities.
//
// mu is a renewal process: after every 1 the gap of 0's before the next 1 is
// i with probability q_i = p_i prod_{k<i}(1 - p_k). Writing
// A_i = prod_{k<i}(1 - p_k), the stationary density of 1's is 1 / sum_i A_i and
// the age l at a site (0's since the last 1) has law A_i / sum_i A_i.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmeasure/blockseq.hpp"
#include "gmeasure/kernel.hpp"

namespace gmeasure {

class CertificateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value with a certified absolute truncation error.
struct Certified {
  double value = 0.0;
  double error = 0.0;

  static Certified from_interval(double lo, double hi) { return {0.5 * (lo + hi), 0.5 * (hi - lo)}; }
  double lower() const { return value - error; }
  double upper() const { return value + error; }
};

constexpr double kDefaultTol = 1e-12;

// ---------------------------------------------------------------------------
// Closed forms

namespace detail {

constexpr Index kLogSpaceThreshold = 50;

// prod_{k<i} (1 - p_k) / (1 - p_{k+j})
inline double shift_ratio(const PSequence& seq, Index i, Index j) {
  if (i + j > kLogSpaceThreshold) {
    double log_ratio = 0.0;
    for (Index k = 0; k < i; ++k) log_ratio += std::log(seq.complement(k)) - std::log(seq.complement(k + j));
    return std::exp(log_ratio);
  }
  double ratio = 1.0;
  for (Index k = 0; k < i; ++k) ratio *= seq.complement(k) / seq.complement(k + j);
  return ratio;
}

inline void require_finite_window(Index i, Index j) {
  if (i < 0 || j < 0) throw std::domain_error("i and j must be >= 0");
}

}  // namespace detail

/// mu(X_0 = 0 | 1 0^i [.] 0^j 1)
///   = (1 + p_i p_j / ((1 - p_{i+j}) p_{i+j+1}) * prod_{k<i} (1-p_k)/(1-p_{k+j}))^{-1}.
/// The value does not depend on anything outside the two nearest 1's.
inline double two_sided_conditional(const PSequence& seq, Index i, Index j) {
  detail::require_finite_window(i, j);
  const double front = seq.p(i) * seq.p(j) / (seq.complement(i + j) * seq.p(i + j + 1));
  return 1.0 / (1.0 + front * detail::shift_ratio(seq, i, j));
}

namespace detail {

inline double osc_p(const OscillatingParams& params, Index k) {
  return 1.0 - (1.0 - params.p_inf()) * std::pow(params.xi(), blockseq::v(k).convert_to<double>());
}

inline double osc_complement(const OscillatingParams& params, Index k) {
  return (1.0 - params.p_inf()) * std::pow(params.xi(), blockseq::v(k).convert_to<double>());
}

}  // namespace detail

/// [1-(1-p_inf)xi^{v_i}][1-(1-p_inf)xi^{v_j}] / ((1-p_inf)xi^{v_{i+j}} [1-(1-p_inf)xi^{v_{i+j+1}}]);
/// tends to p_inf / (1 - p_inf) as i, j grow.
inline double prefactor(const OscillatingParams& params, Index i, Index j) {
  detail::require_finite_window(i, j);
  return detail::osc_p(params, i) * detail::osc_p(params, j) /
         (detail::osc_complement(params, i + j) * detail::osc_p(params, i + j + 1));
}

/// Same conditional for the oscillating family, with the shift ratio replaced
/// by xi^{sum_{k<i}(v_k - v_{k+j})} and the exponent taken as an exact rational.
inline double two_sided_conditional_closed(const OscillatingParams& params, Index i, Index j) {
  detail::require_finite_window(i, j);
  const double exponent = blockseq::window_sum(i, j).convert_to<double>();
  return 1.0 / (1.0 + prefactor(params, i, j) * std::pow(params.xi(), exponent));
}

/// Limit of the two-sided conditional along family `ell`:
/// (1-p_inf) xi / ((1-p_inf) xi + p_inf) for ell = 1 and 1 - p_inf for ell = 2.
inline double limit_value(const OscillatingParams& params, int ell) {
  const double q = 1.0 - params.p_inf();
  if (ell == 1) return q * params.xi() / (q * params.xi() + params.p_inf());
  if (ell == 2) return q;
  throw std::invalid_argument("ell must be 1 or 2");
}

/// mu(X_0 = 0 | past with l = ell) = 1 - p_ell.
inline double one_sided_conditional(const PSequence& seq, Distance ell) { return seq.complement(ell); }

// ---------------------------------------------------------------------------
// Renewal structure

/// Law of the number of 0's between consecutive 1's.
class GapDistribution {
 public:
  explicit GapDistribution(PSequence seq) : seq_(std::move(seq)) {}

  /// A_i = prod_{k<i} (1 - p_k): probability the gap is at least i.
  double survival(Index i) const {
    double a = 1.0;
    for (Index k = 0; k < i; ++k) a *= seq_.complement(k);
    return a;
  }

  double q(Index i) const { return seq_.p(i) * survival(i); }

  /// Geometric certificate q_i <= A_i <= (1 - eps)^i.
  double geometric_bound(Index i) const { return std::pow(1.0 - seq_.eps(), static_cast<double>(i)); }

  /// sum_{i<=n} q_i = 1 - A_{n+1}.
  double mass_up_to(Index n) const { return 1.0 - survival(n + 1); }

  std::vector<double> head(Index n) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    double a = 1.0;
    for (Index i = 0; i <= n; ++i) {
      out.push_back(seq_.p(i) * a);
      a *= seq_.complement(i);
    }
    return out;
  }

  const PSequence& sequence() const { return seq_; }

 private:
  PSequence seq_;
};

inline GapDistribution gap_distribution(const PSequence& seq) { return GapDistribution(seq); }

/// Survival terms A_0..A_N with a certificate on the omitted tail:
/// sum_{i>N} A_i <= tail = A_{N+1} / inf_{k>N} p_k <= rel_tol * sum_{i<=N} A_i.
class RenewalSeries {
 public:
  static constexpr Index kMaxTerms = 20'000'000;

  RenewalSeries(const PSequence& seq, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    const double rel = 0.25 * tol;
    double a = 1.0;
    for (Index i = 0;; ++i) {
      survival_.push_back(a);
      head_sum_ += a;
      const double next = a * seq.complement(i);
      tail_ = next / seq.tail_infimum(i + 1);
      if (tail_ <= rel * head_sum_) break;
      if (i + 1 >= kMaxTerms) throw CertificateFailure("renewal series did not reach tolerance within the term cap");
      a = next;
    }
  }

  Index terms() const { return static_cast<Index>(survival_.size()); }
  double survival(Index i) const { return survival_[static_cast<std::size_t>(i)]; }
  double head_sum() const { return head_sum_; }
  double tail() const { return tail_; }

  /// Certified normalizer sum_i A_i.
  double total_lower() const { return head_sum_; }
  double total_upper() const { return head_sum_ + tail_; }

 private:
  std::vector<double> survival_;
  double head_sum_ = 0.0;
  double tail_ = 0.0;
};

/// mu(X_0 = 1) = 1 / sum_i A_i.
inline Certified marginal_one(const PSequence& seq, double tol = kDefaultTol) {
  const RenewalSeries series(seq, tol);
  return Certified::from_interval(1.0 / series.total_upper(), 1.0 / series.total_lower());
}

/// mu(l = i at a site) = A_i / sum_k A_k.
inline Certified age_distribution(const PSequence& seq, Index i, double tol = kDefaultTol) {
  if (i < 0) throw std::domain_error("age must be >= 0");
  const RenewalSeries series(seq, tol);
  const double a = GapDistribution(seq).survival(i);
  return Certified::from_interval(a / series.total_upper(), a / series.total_lower());
}

// ---------------------------------------------------------------------------
// Cylinders

struct CylinderSpec {
  Index offset = 0;
  Word word;
};

inline Word parse_word(const std::string& text) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw InvalidParameter("word must contain only '0' and '1'");
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

inline std::string format_word(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Symbol x : w) s.push_back(x ? '1' : '0');
  return s;
}

/// mu(X_offset .. X_{offset+n-1} = word). Stationarity makes the offset
/// irrelevant. Sums over the age at the first site; the word factorizes at its
/// first 1, so only the prefix up to that 1 depends on the age.
inline Certified cylinder_probability(const PSequence& seq, const CylinderSpec& cyl, double tol = kDefaultTol) {
  if (cyl.word.empty()) throw std::invalid_argument("cylinder word must be nonempty");
  const Word& w = cyl.word;
  std::size_t first_one = 0;
  while (first_one < w.size() && w[first_one] == 0) ++first_one;
  const bool has_one = first_one < w.size();

  // Everything after the first 1 starts from l = 0.
  double suffix = 1.0;
  if (has_one) {
    Distance ell = 0;
    for (std::size_t t = first_one + 1; t < w.size(); ++t) {
      suffix *= g(seq, w[t], ell);
      ell = w[t] ? Distance(0) : ell.next();
    }
  }

  const RenewalSeries series(seq, tol);
  const auto a = static_cast<Index>(first_one);
  double weighted = 0.0;
  for (Index age = 0; age < series.terms(); ++age) {
    double f = 1.0;
    for (Index t = 0; t < a; ++t) f *= seq.complement(age + t);
    if (has_one) f *= seq.p(age + a);
    weighted += series.survival(age) * f;
  }
  // Omitted ages contribute at most tail * 1.
  const double lo = suffix * weighted / series.total_upper();
  const double hi = suffix * (weighted + series.tail()) / series.total_lower();
  return Certified::from_interval(lo, std::min(hi, 1.0));
}

/// mu(X_0 = 0 | left [.] right) as the ratio of the two cylinders with 0 and 1
/// at the origin, with interval-propagated error.
inline Certified conditional_from_cylinders(const PSequence& seq, const Word& left, const Word& right,
                                            double tol = kDefaultTol) {
  auto with_center = [&](Symbol center) {
    CylinderSpec cyl{-static_cast<Index>(left.size()), left};
    cyl.word.push_back(center);
    cyl.word.insert(cyl.word.end(), right.begin(), right.end());
    return cylinder_probability(seq, cyl, tol);
  };
  const Certified zero = with_center(0);
  const Certified one = with_center(1);
  if (!(zero.lower() + one.lower() > 0.0)) {
    throw CertificateFailure("tolerance failure: denominator lower bound is not positive; tighten tol");
  }
  const double lo = std::max(zero.lower(), 0.0) / (std::max(zero.lower(), 0.0) + one.upper());
  const double hi = zero.upper() / (zero.upper() + std::max(one.lower(), 0.0));
  return Certified::from_interval(lo, hi);
}

/// Left word 1 0^i and right word 0^j 1.
inline std::pair<Word, Word> renewal_context(Index i, Index j) {
  Word left(static_cast<std::size_t>(i + 1), 0);
  left.front() = 1;
  Word right(static_cast<std::size_t>(j + 1), 0);
  right.back() = 1;
  return {left, right};
}

}  // namespace gmeasure
