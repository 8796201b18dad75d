#pragma once

// Command-line driver: every experiment is a subcommand that prints one table
// as CSV or JSON.
//
// Exit codes: 0 success, 2 configuration rejected, 3 a numerical certificate
// failed (insufficient Monte-Carlo hits, shift-search cap exhausted, ...).

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmeasure/blockseq.hpp"
#include "gmeasure/exact.hpp"
#include "gmeasure/kernel.hpp"
#include "gmeasure/sample.hpp"
#include "gmeasure/version.hpp"

namespace gmeasure::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kCertificateError = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string family = "oscillating";
  double p_inf = 0.5;
  double xi = 2.0;
  std::optional<double> eps;
  std::vector<double> custom_head;

  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::string format = "csv";

  Index max_k = 14;
  int count = 10;
  std::optional<Index> search_cap;
  int max_skipped = 2;
  Index k_max = 10000;
  Index horizon = 20000;
  Index step = 1000;
  Index i = 2;
  Index j = 2;
  std::optional<Index> ell;
  std::int64_t n_paths = 1'000'000;
  int streams = 1;
  Index offset = 0;
  std::string word = "1";
  Index length = 1000;
};

inline json to_json(const RunConfig& c) {
  json j;
  j["family"] = c.family;
  j["p_inf"] = c.p_inf;
  j["xi"] = c.xi;
  j["eps"] = c.eps ? json(*c.eps) : json(nullptr);
  j["custom_head"] = c.custom_head;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["format"] = c.format;
  j["max_k"] = c.max_k;
  j["count"] = c.count;
  j["search_cap"] = c.search_cap ? json(*c.search_cap) : json(nullptr);
  j["max_skipped"] = c.max_skipped;
  j["k_max"] = c.k_max;
  j["horizon"] = c.horizon;
  j["step"] = c.step;
  j["i"] = c.i;
  j["j"] = c.j;
  j["ell"] = c.ell ? json(*c.ell) : json(nullptr);
  j["n_paths"] = c.n_paths;
  j["streams"] = c.streams;
  j["offset"] = c.offset;
  j["word"] = c.word;
  j["length"] = c.length;
  return j;
}

namespace detail {

template <class T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j[key].is_null()) return;
  try {
    out = j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
void read_key(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j[key].is_null()) return;
  T value{};
  read_key(j, key, value);
  out = value;
}

}  // namespace detail

/// Applies a flat JSON object onto `c`. Unknown keys are rejected.
inline void apply_config(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config file must hold a flat JSON object");
  const json known = to_json(RunConfig{});
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  detail::read_key(j, "family", c.family);
  detail::read_key(j, "p_inf", c.p_inf);
  detail::read_key(j, "xi", c.xi);
  detail::read_key(j, "eps", c.eps);
  detail::read_key(j, "custom_head", c.custom_head);
  detail::read_key(j, "seed", c.seed);
  detail::read_key(j, "tol", c.tol);
  detail::read_key(j, "format", c.format);
  detail::read_key(j, "max_k", c.max_k);
  detail::read_key(j, "count", c.count);
  detail::read_key(j, "search_cap", c.search_cap);
  detail::read_key(j, "max_skipped", c.max_skipped);
  detail::read_key(j, "k_max", c.k_max);
  detail::read_key(j, "horizon", c.horizon);
  detail::read_key(j, "step", c.step);
  detail::read_key(j, "i", c.i);
  detail::read_key(j, "j", c.j);
  detail::read_key(j, "ell", c.ell);
  detail::read_key(j, "n_paths", c.n_paths);
  detail::read_key(j, "streams", c.streams);
  detail::read_key(j, "offset", c.offset);
  detail::read_key(j, "word", c.word);
  detail::read_key(j, "length", c.length);
}

inline PSequence sequence_of(const RunConfig& c) {
  SequenceConfig sc;
  sc.family = c.family;
  sc.p_inf = c.p_inf;
  sc.xi = c.xi;
  sc.eps = c.eps;
  sc.custom_head = c.custom_head;
  return make_sequence(sc);
}

inline void validate(const RunConfig& c) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  check(c.format == "csv" || c.format == "json", "format must be csv or json");
  check(c.tol > 0.0 && c.tol < 1.0, "tol must satisfy 0 < tol < 1");
  check(c.max_k >= 0, "max-k must be >= 0");
  check(c.count >= 1, "count must be >= 1");
  check(!c.search_cap || *c.search_cap >= 1, "search-cap must be >= 1");
  check(c.max_skipped >= 0, "max-skipped must be >= 0");
  check(c.k_max >= 0, "k-max must be >= 0");
  check(c.horizon >= c.k_max, "horizon must be >= k-max");
  check(c.step >= 1, "step must be >= 1");
  check(c.i >= 0 && c.j >= 0, "i and j must be >= 0");
  check(!c.ell || *c.ell >= 0, "ell must be >= 0");
  check(c.n_paths >= 1, "n-paths must be >= 1");
  check(c.streams >= 1 && c.streams <= 256, "streams must lie in [1, 256]");
  check(c.length >= 1, "length must be >= 1");
  (void)sequence_of(c);
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json extra = json::object();  // emitted under meta
};

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_rational(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  return num.str() + "/" + den.str();
}

inline std::string csv_cell(const Cell& cell) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_double(x);
        else return x;
      },
      cell);
}

inline json json_cell(const Cell& cell) {
  return std::visit([](const auto& x) { return json(x); }, cell);
}

inline void write_table(std::ostream& out, const std::string& command, const RunConfig& cfg, const Table& t) {
  json meta;
  meta["artifact"] = kArtifactName;
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config"] = to_json(cfg);
  for (const auto& [k, v] : t.extra.items()) meta[k] = v;

  if (cfg.format == "json") {
    json doc;
    doc["meta"] = meta;
    doc["rows"] = json::array();
    for (const auto& row : t.rows) {
      json obj;
      for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = json_cell(row[c]);
      doc["rows"].push_back(std::move(obj));
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# " << meta.dump() << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Subcommands

inline Table cmd_vseq(const RunConfig& c) {
  Table t{{"k", "r_k", "v_k", "S_k_plus_1"}, {}};
  for (Index k = 0; k <= c.max_k; ++k) {
    t.rows.push_back({k, blockseq::block_index(k), format_rational(blockseq::v(k)),
                      format_rational(blockseq::partial_sum(k + 1))});
  }
  return t;
}

inline OscillatingParams require_oscillating(const RunConfig& c) {
  const auto params = sequence_of(c).params();
  if (!params) throw ConfigError("this subcommand requires --family oscillating");
  return *params;
}

inline Table cmd_oscillate(const RunConfig& c) {
  const OscillatingParams params = require_oscillating(c);
  Table t{{"ell", "n", "i_n", "j_n", "window_sum", "conditional", "limit", "abs_gap"}, {}};
  json skipped = json::array();
  blockseq::SearchOptions options;
  options.search_cap = c.search_cap;
  options.max_skipped = c.max_skipped;
  const std::vector<int> families = c.ell ? std::vector<int>{static_cast<int>(*c.ell)} : std::vector<int>{1, 2};
  for (int ell : families) {
    if (ell != 1 && ell != 2) throw ConfigError("ell must be 1 or 2 for oscillate");
    const auto search = blockseq::find_subsequences(ell, c.count, options);
    const double limit = limit_value(params, ell);
    for (const auto& pair : search.pairs) {
      const double value = two_sided_conditional_closed(params, pair.i, pair.j);
      t.rows.push_back({std::int64_t{ell}, std::int64_t{pair.n}, pair.i, pair.j, format_rational(pair.window_sum),
                        value, limit, std::abs(value - limit)});
    }
    for (const auto& s : search.skipped) skipped.push_back({{"ell", ell}, {"i", s.i}, {"last_shift", s.last_shift}});
  }
  t.extra["skipped_candidates"] = skipped;
  return t;
}

inline Table cmd_continuity(const RunConfig& c) {
  const PSequence seq = sequence_of(c);
  Table t{{"k", "lower", "upper"}, {}};
  const auto rows = continuity_profile(seq, c.k_max, c.horizon);
  for (Index k = 0; k <= c.k_max; k += c.step) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    t.rows.push_back({k, row.bracket.lower, row.bracket.upper});
  }
  if (c.k_max % c.step != 0) {
    const auto& row = rows.back();
    t.rows.push_back({row.k, row.bracket.lower, row.bracket.upper});
  }
  return t;
}

inline Table cmd_estimate(const RunConfig& c) {
  const PSequence seq = sequence_of(c);
  Table t{{"kind", "i", "j", "exact", "mc_value", "std_error", "z_score", "n_hits", "n_paths"}, {}};
  Estimate e;
  double exact = 0.0;
  std::string kind;
  Index i = c.i;
  Index j = c.j;
  if (c.ell) {
    kind = "one-sided";
    i = *c.ell;
    j = -1;
    exact = one_sided_conditional(seq, *c.ell);
    e = mc_one_sided(seq, *c.ell, c.n_paths, c.seed, c.tol, c.streams);
  } else {
    kind = "two-sided";
    exact = two_sided_conditional(seq, c.i, c.j);
    e = mc_conditional(seq, c.i, c.j, c.n_paths, c.seed, c.tol, c.streams);
  }
  const double z = e.std_error > 0.0 ? (e.value - exact) / e.std_error : 0.0;
  t.rows.push_back({kind, i, j, exact, e.value, e.std_error, z, e.n_hits, e.n_samples});
  return t;
}

inline Table cmd_cylinder(const RunConfig& c) {
  const PSequence seq = sequence_of(c);
  Word word;
  try {
    word = parse_word(c.word);
  } catch (const InvalidParameter& err) {
    throw ConfigError(err.what());
  }
  if (word.empty()) throw ConfigError("word must be nonempty");
  const Certified p = cylinder_probability(seq, {c.offset, word}, c.tol);
  Table t{{"offset", "word", "probability", "error_bound"}, {}};
  t.rows.push_back({c.offset, c.word, p.value, p.error});
  return t;
}

inline Table cmd_simulate(const RunConfig& c) {
  const PSequence seq = sequence_of(c);
  const SamplePath path = stationary_sample(seq, c.length, c.seed, c.tol);
  const PathSummary s = summarize_path(seq, path.symbols);
  const Certified marginal = marginal_one(seq, c.tol);
  const double z = s.batch_std_error > 0.0 ? (s.frequency - marginal.value) / s.batch_std_error : std::nan("");
  Table t{{"length", "seed", "left_age", "ones", "frequency", "marginal_one", "batch_std_error", "z_score", "gap_chi2",
           "gap_dof", "gap_p_value", "symbols"},
          {}};
  t.rows.push_back({s.length, static_cast<std::int64_t>(path.seed), path.left_age.value(), s.ones, s.frequency,
                    marginal.value, s.batch_std_error, z, s.gap_fit.statistic, std::int64_t{s.gap_fit.dof},
                    s.gap_fit.p_value, format_word(path.symbols)});
  json hist = json::array();
  for (auto n : s.gap_counts) hist.push_back(n);
  t.extra["gap_histogram"] = hist;
  return t;
}

// ---------------------------------------------------------------------------
// Entry point

/// Values given on the command line; they override the config file.
struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::string> out_path;
  std::optional<std::string> family;
  std::optional<double> p_inf;
  std::optional<double> xi;
  std::optional<double> eps;
  std::vector<double> custom_head;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> format;
  std::optional<Index> max_k;
  std::optional<int> count;
  std::optional<Index> search_cap;
  std::optional<int> max_skipped;
  std::optional<Index> k_max;
  std::optional<Index> horizon;
  std::optional<Index> step;
  std::optional<Index> i;
  std::optional<Index> j;
  std::optional<Index> ell;
  std::optional<std::int64_t> n_paths;
  std::optional<int> streams;
  std::optional<Index> offset;
  std::optional<std::string> word;
  std::optional<Index> length;
};

inline void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_path, "Flat JSON config file");
  sub.add_option("--out", f.out_path, "Write output here instead of stdout");
  sub.add_option("--family", f.family, "oscillating | constant | custom-finite-tail");
  sub.add_option("--p-inf", f.p_inf, "Limit p_inf (also the constant family's p)");
  sub.add_option("--xi", f.xi, "Oscillation base xi, 1 < xi < (1-p_inf)^-2");
  sub.add_option("--eps", f.eps, "Declared lower bound on p_k (checked)");
  sub.add_option("--custom-head", f.custom_head, "Head values p_0.. for custom-finite-tail")->delimiter(',');
  sub.add_option("--seed", f.seed, "RNG seed");
  sub.add_option("--tol", f.tol, "Series truncation tolerance");
  sub.add_option("--format", f.format, "csv | json");
}

template <class T>
void overlay(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

template <class T>
void overlay(const std::optional<T>& flag, std::optional<T>& target) {
  if (flag) target = *flag;
}

inline RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (f.config_path) {
    std::ifstream in(*f.config_path);
    if (!in) throw ConfigError("cannot read config file " + *f.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    apply_config(j, c);
  }
  overlay(f.family, c.family);
  overlay(f.p_inf, c.p_inf);
  overlay(f.xi, c.xi);
  overlay(f.eps, c.eps);
  if (!f.custom_head.empty()) c.custom_head = f.custom_head;
  overlay(f.seed, c.seed);
  overlay(f.tol, c.tol);
  overlay(f.format, c.format);
  overlay(f.max_k, c.max_k);
  overlay(f.count, c.count);
  overlay(f.search_cap, c.search_cap);
  overlay(f.max_skipped, c.max_skipped);
  overlay(f.k_max, c.k_max);
  overlay(f.horizon, c.horizon);
  overlay(f.step, c.step);
  overlay(f.i, c.i);
  overlay(f.j, c.j);
  overlay(f.ell, c.ell);
  overlay(f.n_paths, c.n_paths);
  overlay(f.streams, c.streams);
  overlay(f.offset, c.offset);
  overlay(f.word, c.word);
  overlay(f.length, c.length);
  return c;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for a non-Gibbsian g-measure with variable-length memory"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Flags f;

  auto* vseq = app.add_subcommand("vseq", "Block sequence v_k and partial sums, exact");
  add_common(*vseq, f);
  vseq->add_option("--max-k", f.max_k, "Last index k");

  auto* osc = app.add_subcommand("oscillate", "Two-sided conditionals along both oscillation families");
  add_common(*osc, f);
  osc->add_option("--count", f.count, "Pairs per family");
  osc->add_option("--search-cap", f.search_cap, "Largest shift examined per candidate");
  osc->add_option("--max-skipped", f.max_skipped, "Candidates allowed to exhaust the cap");
  osc->add_option("--ell", f.ell, "Only this family (1 or 2)");

  auto* cont = app.add_subcommand("continuity", "Certified brackets of sup_{l,m>=k}|p_l - p_m|");
  add_common(*cont, f);
  cont->add_option("--k-max", f.k_max, "Largest k reported");
  cont->add_option("--horizon", f.horizon, "Scan horizon (>= k-max)");
  cont->add_option("--step", f.step, "Row spacing in k");

  auto* est = app.add_subcommand("estimate", "Monte-Carlo conditional against its exact value");
  add_common(*est, f);
  est->add_option("--i", f.i, "0's between the left 1 and the origin");
  est->add_option("--j", f.j, "0's between the origin and the right 1");
  est->add_option("--ell", f.ell, "One-sided: condition on 1 0^ell to the left only");
  est->add_option("--n-paths", f.n_paths, "Independent stationary windows");
  est->add_option("--streams", f.streams, "Independent seeded streams (threads)");

  auto* cyl = app.add_subcommand("cylinder", "Certified cylinder probability");
  add_common(*cyl, f);
  cyl->add_option("--offset", f.offset, "Leftmost site");
  cyl->add_option("--word", f.word, "Symbols over {0,1}");

  auto* sim = app.add_subcommand("simulate", "Exact stationary sample path with summary statistics");
  add_common(*sim, f);
  sim->add_option("--length", f.length, "Path length");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const RunConfig cfg = resolve(f);
    validate(cfg);
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Table table;
    if (name == "vseq") table = cmd_vseq(cfg);
    else if (name == "oscillate") table = cmd_oscillate(cfg);
    else if (name == "continuity") table = cmd_continuity(cfg);
    else if (name == "estimate") table = cmd_estimate(cfg);
    else if (name == "cylinder") table = cmd_cylinder(cfg);
    else table = cmd_simulate(cfg);

    if (f.out_path) {
      std::ofstream file(*f.out_path);
      if (!file) throw ConfigError("cannot open output file " + *f.out_path);
      write_table(file, name, cfg, table);
    } else {
      write_table(out, name, cfg, table);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidParameter& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CertificateFailure& e) {
    err << "certificate failure: " << e.what() << '\n';
    return kCertificateError;
  } catch (const blockseq::SearchCapExhausted& e) {
    err << "certificate failure: " << e.what() << '\n';
    return kCertificateError;
  } catch (const NoTailBound& e) {
    err << "certificate failure: " << e.what() << '\n';
    return kCertificateError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace gmeasure::cli
