#pragma once

// Goodness-of-fit helpers for the Monte-Carlo cross-checks.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace gmeasure::stats {

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

inline double chi_square_sf(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

/// Pearson test of counts against category probabilities. Adjacent trailing
/// categories are pooled until every expected count is >= min_expected; the
/// last pooled bin absorbs the residual probability mass.
inline ChiSquare chi_square_gof(const std::vector<std::int64_t>& observed, const std::vector<double>& probs,
                                double min_expected = 5.0) {
  if (observed.size() != probs.size()) throw std::invalid_argument("observed and probs differ in length");
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  if (n <= 0) throw std::invalid_argument("no observations");

  std::vector<double> obs_bins;
  std::vector<double> exp_bins;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  double mass = 0.0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    obs_acc += static_cast<double>(observed[c]);
    exp_acc += n * probs[c];
    mass += probs[c];
    if (exp_acc >= min_expected && n * (1.0 - mass) >= min_expected) {
      obs_bins.push_back(obs_acc);
      exp_bins.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  obs_bins.push_back(obs_acc);
  exp_bins.push_back(exp_acc + n * std::max(0.0, 1.0 - mass));

  ChiSquare out;
  for (std::size_t b = 0; b < obs_bins.size(); ++b) {
    if (exp_bins[b] > 0.0) out.statistic += (obs_bins[b] - exp_bins[b]) * (obs_bins[b] - exp_bins[b]) / exp_bins[b];
  }
  out.dof = static_cast<int>(obs_bins.size()) - 1;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

/// Test that several rows of category counts share one distribution.
inline ChiSquare chi_square_homogeneity(const std::vector<std::vector<std::int64_t>>& table) {
  if (table.size() < 2) throw std::invalid_argument("need at least two rows");
  const std::size_t cols = table.front().size();
  std::vector<double> col_sum(cols, 0.0);
  std::vector<double> row_sum(table.size(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto x = static_cast<double>(table[r][c]);
      col_sum[c] += x;
      row_sum[r] += x;
      total += x;
    }
  }
  ChiSquare out;
  int used_cols = 0;
  for (std::size_t c = 0; c < cols; ++c) {
    if (col_sum[c] == 0.0) continue;
    ++used_cols;
    for (std::size_t r = 0; r < table.size(); ++r) {
      const double e = row_sum[r] * col_sum[c] / total;
      const double d = static_cast<double>(table[r][c]) - e;
      out.statistic += d * d / e;
    }
  }
  out.dof = (static_cast<int>(table.size()) - 1) * (used_cols - 1);
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

/// Standard error of a mean of correlated 0/1 data from `batches` equal batches.
inline double batch_means_se(const std::vector<std::uint8_t>& xs, int batches = 50) {
  const std::size_t size = xs.size() / static_cast<std::size_t>(batches);
  if (size == 0) return std::nan("");
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    const auto first = xs.begin() + static_cast<std::ptrdiff_t>(b * size);
    means.push_back(static_cast<double>(std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0)) /
                    static_cast<double>(size));
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return std::sqrt(ss / (batches - 1) / batches);
}

}  // namespace gmeasure::stats
