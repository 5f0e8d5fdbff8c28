#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/graph.hpp"

namespace blockwatch {

struct PowerLawFit {
  double alpha = 0.0;
  double x_min = 0.0;
  double ks_distance = 1.0;
  std::size_t n_tail = 0;
};

namespace detail {

/// KS distance between the empirical tail CDF and the fitted continuous
/// power law F(x) = 1 - (x / x_min)^(1 - alpha). `tail` is sorted ascending.
inline double powerlaw_ks(const std::vector<double>& tail, double x_min, double alpha) {
  const std::size_t n = tail.size();
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double model = 1.0 - std::pow(tail[i] / x_min, 1.0 - alpha);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    ks = std::max(ks, std::max(std::abs(model - lo), std::abs(model - hi)));
  }
  return ks;
}

}  // namespace detail

/// Continuous maximum-likelihood power-law fit with the x_min chosen to
/// minimize the KS distance over candidate cutoffs (distinct observed values
/// up to the given quantile). Requires `min_tail` samples above a candidate
/// for it to be considered.
inline PowerLawFit powerlaw_fit(std::vector<double> samples, std::size_t min_tail = 50,
                                double xmin_quantile_cap = 0.9) {
  std::sort(samples.begin(), samples.end());
  while (!samples.empty() && samples.front() <= 0.0)
    samples.erase(samples.begin());  // power law is defined for positive values
  const std::size_t n = samples.size();
  if (n < min_tail) throw Error(Errc::InsufficientTail, "not enough positive samples");

  const std::size_t cap_index =
      std::min(n - 1, static_cast<std::size_t>(xmin_quantile_cap * static_cast<double>(n)));
  const double cap_value = samples[cap_index];

  PowerLawFit best;
  bool found = false;
  std::size_t start = 0;
  while (start < n) {
    const double x_min = samples[start];
    if (x_min > cap_value) break;
    const std::size_t n_tail = n - start;
    if (n_tail < min_tail) break;

    double log_sum = 0.0;
    for (std::size_t i = start; i < n; ++i) log_sum += std::log(samples[i] / x_min);
    if (log_sum > 0.0) {
      const double alpha = 1.0 + static_cast<double>(n_tail) / log_sum;
      const std::vector<double> tail(samples.begin() + static_cast<std::ptrdiff_t>(start),
                                     samples.end());
      const double ks = detail::powerlaw_ks(tail, x_min, alpha);
      if (!found || ks < best.ks_distance) {
        best = {alpha, x_min, ks, n_tail};
        found = true;
      }
    }
    // advance to the next distinct value
    const double current = samples[start];
    while (start < n && samples[start] == current) ++start;
  }
  if (!found) throw Error(Errc::InsufficientTail, "no candidate cutoff with tail variation");
  return best;
}

/// Inverse-CDF sampler for test/validation use: x = x_min * u^(-1/(alpha-1)).
inline double powerlaw_sample(double x_min, double alpha, double u01) {
  return x_min * std::pow(1.0 - u01, -1.0 / (alpha - 1.0));
}

/// Inter-event times: successive differences of the account's sorted
/// transaction blocks, both directions merged. Zero gaps (same-bin pairs)
/// are legitimate samples.
inline std::vector<double> iet_samples(const TemporalGraph& g, std::uint32_t account) {
  const auto& in = g.in_events(account);
  const auto& out = g.out_events(account);
  std::vector<BlockNumber> blocks;
  blocks.reserve(in.size() + out.size());
  for (const Event& e : in) blocks.push_back(e.bin);
  for (const Event& e : out) blocks.push_back(e.bin);
  std::sort(blocks.begin(), blocks.end());
  if (blocks.size() < 2)
    throw Error(Errc::TooFewTransactions, "inter-event times need >= 2 transactions");
  std::vector<double> deltas;
  deltas.reserve(blocks.size() - 1);
  for (std::size_t i = 1; i < blocks.size(); ++i)
    deltas.push_back(static_cast<double>(blocks[i] - blocks[i - 1]));
  return deltas;
}

/// Plot-ready complementary CDF: (x, P(X >= x)) over distinct sample values.
inline std::vector<std::pair<double, double>> ccdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<std::pair<double, double>> out;
  const std::size_t n = samples.size();
  std::size_t i = 0;
  while (i < n) {
    const double x = samples[i];
    out.emplace_back(x, static_cast<double>(n - i) / static_cast<double>(n));
    while (i < n && samples[i] == x) ++i;
  }
  return out;
}

}  // namespace blockwatch
