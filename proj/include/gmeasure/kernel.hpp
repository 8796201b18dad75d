#pragma once

// The renewal g-function P(1 | past) = p_{l(past)}, where l(past) counts the
// 0's since the most recent 1, together with the probability sequences that
// drive it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gmeasure/blockseq.hpp"

namespace gmeasure {

using Index = std::int64_t;
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// Rejected parameters. The message names the violated constraint.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndeterminateContext : public std::domain_error {
 public:
  IndeterminateContext()
      : std::domain_error("indeterminate context: window is all zeros and the remainder is unspecified") {}
};

class NoTailBound : public std::domain_error {
 public:
  NoTailBound() : std::domain_error("no tail bound: sequence declares no tail envelope") {}
};

/// Number of 0's back (or forward) to the nearest 1; may be infinite.
class Distance {
 public:
  constexpr Distance() = default;
  constexpr Distance(Index value) : value_(value) {  // NOLINT(google-explicit-constructor)
    if (value < 0) throw std::domain_error("distance must be >= 0");
  }

  static constexpr Distance infinity() {
    Distance d;
    d.value_ = kInfinite;
    return d;
  }

  constexpr bool is_infinite() const { return value_ == kInfinite; }
  constexpr Index value() const {
    if (is_infinite()) throw std::domain_error("infinite distance has no finite value");
    return value_;
  }

  /// One more 0 seen; infinity absorbs.
  constexpr Distance next() const { return is_infinite() ? *this : Distance(value_ + 1); }

  friend constexpr bool operator==(Distance, Distance) = default;
  friend constexpr auto operator<=>(Distance, Distance) = default;

  std::string to_string() const { return is_infinite() ? "inf" : std::to_string(value_); }

 private:
  static constexpr Index kInfinite = std::numeric_limits<Index>::max();
  Index value_ = 0;
};

/// Parameters of the oscillating family p_k = 1 - (1 - p_inf) xi^{v_k}.
class OscillatingParams {
 public:
  static OscillatingParams make(double p_inf, double xi) {
    if (!(p_inf > 0.0 && p_inf < 1.0)) throw InvalidParameter("p_inf must satisfy 0 < p_inf < 1");
    const double upper = 1.0 / ((1.0 - p_inf) * (1.0 - p_inf));
    if (!(xi > 1.0 && xi < upper)) {
      throw InvalidParameter("xi must satisfy 1 < xi < (1 - p_inf)^-2 (= " + std::to_string(upper) + ")");
    }
    return OscillatingParams(p_inf, xi);
  }

  double p_inf() const { return p_inf_; }
  double xi() const { return xi_; }

 private:
  OscillatingParams(double p_inf, double xi) : p_inf_(p_inf), xi_(xi) {}
  double p_inf_;
  double xi_;
};

enum class Family { oscillating, constant, custom_finite_tail, custom };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::oscillating: return "oscillating";
    case Family::constant: return "constant";
    case Family::custom_finite_tail: return "custom-finite-tail";
    case Family::custom: return "custom";
  }
  return "?";
}

/// An immutable probability sequence {p_k} with its limit p_inf and a positive
/// lower bound eps = inf p_k. Both p_k and 1 - p_k are evaluated directly so
/// that neither loses precision to cancellation.
class PSequence {
  struct Oscillating {
    OscillatingParams params;
    double log_xi;
  };
  struct Constant {
    double p;
  };
  struct FiniteTail {
    std::vector<double> head;
    double p_inf;
  };
  struct Opaque {
    std::function<double(Index)> p;
    double p_inf;
    double eps;
  };

 public:
  static PSequence oscillating(const OscillatingParams& params) {
    return PSequence(Oscillating{params, std::log(params.xi())});
  }

  static PSequence constant(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("p must satisfy 0 < p < 1");
    return PSequence(Constant{p});
  }

  /// p_k = head[k] for k < head.size(), p_inf afterwards.
  static PSequence custom_finite_tail(std::vector<double> head, double p_inf) {
    if (!(p_inf > 0.0 && p_inf < 1.0)) throw InvalidParameter("p_inf must satisfy 0 < p_inf < 1");
    for (double p : head) {
      if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("custom head values must lie in (0, 1)");
    }
    return PSequence(FiniteTail{std::move(head), p_inf});
  }

  /// Arbitrary evaluator without a tail envelope; continuity diagnostics and
  /// certified series are unavailable for it.
  static PSequence custom(std::function<double(Index)> p, double p_inf, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("eps must satisfy 0 < eps < 1");
    return PSequence(Opaque{std::move(p), p_inf, eps});
  }

  Family family() const {
    return std::visit(
        [](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>) return Family::oscillating;
          else if constexpr (std::is_same_v<T, Constant>) return Family::constant;
          else if constexpr (std::is_same_v<T, FiniteTail>) return Family::custom_finite_tail;
          else return Family::custom;
        },
        rep_);
  }

  std::optional<OscillatingParams> params() const {
    if (const auto* o = std::get_if<Oscillating>(&rep_)) return o->params;
    return std::nullopt;
  }

  double limit() const {
    return std::visit(
        [](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>) return f.params.p_inf();
          else if constexpr (std::is_same_v<T, Constant>) return f.p;
          else return f.p_inf;
        },
        rep_);
  }

  double p(Index k) const {
    return std::visit(
        [k](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>) return 1.0 - osc_complement(f, k);
          else if constexpr (std::is_same_v<T, Constant>) return f.p;
          else if constexpr (std::is_same_v<T, FiniteTail>)
            return k < static_cast<Index>(f.head.size()) ? f.head[static_cast<std::size_t>(k)] : f.p_inf;
          else return f.p(k);
        },
        rep_);
  }

  /// 1 - p_k.
  double complement(Index k) const {
    if (const auto* o = std::get_if<Oscillating>(&rep_)) return osc_complement(*o, k);
    return 1.0 - p(k);
  }

  double p(Distance d) const { return d.is_infinite() ? limit() : p(d.value()); }
  double complement(Distance d) const { return d.is_infinite() ? 1.0 - limit() : complement(d.value()); }

  /// inf_k p_k. For the oscillating family this is p_1 = 1 - (1 - p_inf) sqrt(xi),
  /// since v_k <= 1/2 with equality at k = 1, 2.
  double eps() const {
    return std::visit(
        [](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>)
            return 1.0 - (1.0 - f.params.p_inf()) * std::sqrt(f.params.xi());
          else if constexpr (std::is_same_v<T, Constant>) return f.p;
          else if constexpr (std::is_same_v<T, FiniteTail>) {
            double m = f.p_inf;
            for (double p : f.head) m = std::min(m, p);
            return m;
          } else return f.eps;
        },
        rep_);
  }

  /// Lower bound on 1 - p_k over all k, i.e. the non-null constant for 0's.
  double complement_floor() const {
    return std::visit(
        [](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>) return (1.0 - f.params.p_inf()) / f.params.xi();
          else if constexpr (std::is_same_v<T, Constant>) return 1.0 - f.p;
          else if constexpr (std::is_same_v<T, FiniteTail>) {
            double m = f.p_inf;
            for (double p : f.head) m = std::max(m, p);
            return 1.0 - m;
          } else return 0.0;
        },
        rep_);
  }

  /// Strong non-nullness constant: every single-site conditional is >= this.
  double non_null_bound() const { return std::min(eps(), complement_floor()); }

  /// Lower bound on inf_{k >= n} p_k; nondecreasing in n.
  double tail_infimum(Index n) const {
    return std::visit(
        [n, this](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>) {
            const double top = std::min(0.5, 1.0 / static_cast<double>(blockseq::block_index(n)));
            return 1.0 - (1.0 - f.params.p_inf()) * std::exp(f.log_xi * top);
          } else if constexpr (std::is_same_v<T, Constant>) {
            return f.p;
          } else if constexpr (std::is_same_v<T, FiniteTail>) {
            double m = f.p_inf;
            for (auto k = static_cast<std::size_t>(std::max<Index>(n, 0)); k < f.head.size(); ++k) m = std::min(m, f.head[k]);
            return m;
          } else {
            return eps();
          }
        },
        rep_);
  }

  /// Bound on sup_{t > horizon} |p_t - p_inf|, or nullopt when none is declared.
  std::optional<double> tail_envelope(Index horizon) const {
    return std::visit(
        [horizon](const auto& f) -> std::optional<double> {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Oscillating>) {
            const double r = static_cast<double>(blockseq::block_index(horizon));
            const double up = std::expm1(f.log_xi / r);
            const double down = -std::expm1(-f.log_xi / r);
            return (1.0 - f.params.p_inf()) * std::max(up, down);
          } else if constexpr (std::is_same_v<T, Constant>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, FiniteTail>) {
            double m = 0.0;
            for (auto k = static_cast<std::size_t>(horizon + 1); k < f.head.size(); ++k) {
              m = std::max(m, std::abs(f.head[k] - f.p_inf));
            }
            return m;
          } else {
            return std::nullopt;
          }
        },
        rep_);
  }

 private:
  using Rep = std::variant<Oscillating, Constant, FiniteTail, Opaque>;
  explicit PSequence(Rep rep) : rep_(std::move(rep)) {}

  // (1 - p_inf) xi^{v_k} with v_k = (-1)^r / r.
  static double osc_complement(const Oscillating& o, Index k) {
    const Index r = blockseq::block_index(k);
    const double v = static_cast<double>(blockseq::block_sign(r)) / static_cast<double>(r);
    return (1.0 - o.params.p_inf()) * std::exp(o.log_xi * v);
  }

  Rep rep_;
};

// ---------------------------------------------------------------------------
// Construction from a configuration record

struct SequenceConfig {
  std::string family = "oscillating";
  std::optional<double> p_inf;
  std::optional<double> xi;
  std::optional<double> eps;
  std::vector<double> custom_head;
};

inline PSequence make_sequence(const SequenceConfig& cfg) {
  auto require = [](const std::optional<double>& x, const char* name) {
    if (!x) throw InvalidParameter(std::string(name) + " is required for this family");
    return *x;
  };
  PSequence seq = [&] {
    if (cfg.family == "oscillating") {
      return PSequence::oscillating(OscillatingParams::make(require(cfg.p_inf, "p_inf"), require(cfg.xi, "xi")));
    }
    if (cfg.family == "constant") return PSequence::constant(require(cfg.p_inf, "p_inf"));
    if (cfg.family == "custom-finite-tail") {
      return PSequence::custom_finite_tail(cfg.custom_head, require(cfg.p_inf, "p_inf"));
    }
    throw InvalidParameter("family must be one of oscillating, constant, custom-finite-tail");
  }();
  if (cfg.eps && !(*cfg.eps > 0.0 && *cfg.eps <= seq.eps())) {
    throw InvalidParameter("declared eps must satisfy 0 < eps <= inf_k p_k (= " + std::to_string(seq.eps()) + ")");
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Context extraction

/// What lies beyond the observed window.
enum class Beyond {
  unspecified,  // unknown
  zeros,        // the unseen remainder is all 0's
  one,          // a 1 sits immediately beyond the window
};

/// l(past): 0's counted backward from the end of `past` (past.back() is the
/// site just before the origin) until the first 1.
inline Distance ell_of(std::span<const Symbol> past, Beyond beyond) {
  Index zeros = 0;
  for (auto it = past.rbegin(); it != past.rend(); ++it, ++zeros) {
    if (*it != 0) return zeros;
  }
  switch (beyond) {
    case Beyond::zeros: return Distance::infinity();
    case Beyond::one: return zeros;
    case Beyond::unspecified: break;
  }
  throw IndeterminateContext();
}

/// m(future): 0's counted forward from future.front() until the first 1.
inline Distance m_of(std::span<const Symbol> future, Beyond beyond) {
  Index zeros = 0;
  for (auto it = future.begin(); it != future.end(); ++it, ++zeros) {
    if (*it != 0) return zeros;
  }
  switch (beyond) {
    case Beyond::zeros: return Distance::infinity();
    case Beyond::one: return zeros;
    case Beyond::unspecified: break;
  }
  throw IndeterminateContext();
}

/// Transition kernel P(symbol | past with l = ell).
inline double g(const PSequence& seq, Symbol symbol, Distance ell) {
  return symbol != 0 ? seq.p(ell) : seq.complement(ell);
}

// ---------------------------------------------------------------------------
// Continuity modulus sup_{l,m >= k} |p_l - p_m|

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

struct ContinuityRow {
  Index k = 0;
  Bracket bracket;
};

/// Brackets for every k in [0, k_max] at a fixed horizon >= k_max, in one
/// backward sweep. lower scans l, m in [k, horizon]; upper adds the declared
/// tail envelope T for indices beyond the horizon:
///   upper = max(lower, D_k + T, 2T),  D_k = max_{k<=l<=horizon} |p_l - p_inf|.
inline std::vector<ContinuityRow> continuity_profile(const PSequence& seq, Index k_max, Index horizon) {
  if (k_max < 0) throw std::invalid_argument("k must be >= 0");
  if (horizon < k_max) throw std::invalid_argument("horizon must be >= k");
  const auto tail = seq.tail_envelope(horizon);
  if (!tail) throw NoTailBound();
  const double limit = seq.limit();

  std::vector<ContinuityRow> rows(static_cast<std::size_t>(k_max + 1));
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (Index l = horizon; l >= 0; --l) {
    const double p = seq.p(l);
    hi = std::max(hi, p);
    lo = std::min(lo, p);
    dev = std::max(dev, std::abs(p - limit));
    if (l <= k_max) {
      const double lower = hi - lo;
      rows[static_cast<std::size_t>(l)] = {l, {lower, std::max({lower, dev + *tail, 2.0 * *tail})}};
    }
  }
  return rows;
}

inline Bracket continuity_modulus(const PSequence& seq, Index k, Index horizon) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (horizon < k) throw std::invalid_argument("horizon must be >= k");
  const auto tail = seq.tail_envelope(horizon);
  if (!tail) throw NoTailBound();
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (Index l = k; l <= horizon; ++l) {
    const double p = seq.p(l);
    hi = std::max(hi, p);
    lo = std::min(lo, p);
    dev = std::max(dev, std::abs(p - seq.limit()));
  }
  const double lower = hi - lo;
  return {lower, std::max({lower, dev + *tail, 2.0 * *tail})};
}

}  // namespace gmeasure
