#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/graph.hpp"
#include "blockwatch/matrix.hpp"
#include "blockwatch/timeseries.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

// ---------------------------------------------------------------------------
// Active state
// ---------------------------------------------------------------------------

struct ActiveState {
  BlockNumber transacted_first = 0;
  BlockNumber transacted_last = 0;
  BlockNumber duration_active = 0;
  // Length in bins of the trailing maximal run of consecutive nonempty bins.
  BlockNumber active_since_last = 0;
};

namespace detail {

/// Merged, ascending block list of the account's transactions (both sides).
inline std::vector<BlockNumber> merged_blocks(const TemporalGraph& g, std::uint32_t account) {
  const auto& in = g.in_events(account);
  const auto& out = g.out_events(account);
  std::vector<BlockNumber> blocks;
  blocks.reserve(in.size() + out.size());
  std::size_t i = 0, j = 0;
  while (i < in.size() && j < out.size()) {
    if (in[i].bin <= out[j].bin) blocks.push_back(in[i++].bin);
    else blocks.push_back(out[j++].bin);
  }
  while (i < in.size()) blocks.push_back(in[i++].bin);
  while (j < out.size()) blocks.push_back(out[j++].bin);
  return blocks;
}

inline std::vector<BlockNumber> direction_blocks(const TemporalGraph& g, std::uint32_t account,
                                                 Direction dir) {
  if (dir == Direction::Both) return merged_blocks(g, account);
  const auto& events = dir == Direction::In ? g.in_events(account) : g.out_events(account);
  std::vector<BlockNumber> blocks;
  blocks.reserve(events.size());
  for (const Event& e : events) blocks.push_back(e.bin);
  return blocks;
}

}  // namespace detail

inline ActiveState active_state(const TemporalGraph& g, std::uint32_t account) {
  const std::vector<BlockNumber> blocks = detail::merged_blocks(g, account);
  if (blocks.empty()) throw Error(Errc::NoTransactions, "account has no transactions");
  ActiveState as;
  as.transacted_first = blocks.front();
  as.transacted_last = blocks.back();
  as.duration_active = as.transacted_last - as.transacted_first;
  // Walk distinct bins backwards while they stay consecutive.
  BlockNumber run = 1;
  BlockNumber current = blocks.back();
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (*it == current) continue;
    if (*it == current - 1) {
      ++run;
      current = *it;
    } else {
      break;
    }
  }
  as.active_since_last = run;
  return as;
}

// ---------------------------------------------------------------------------
// Attractiveness: per-bin fraction of in-neighbors not seen in the trailing
// window of size theta_a. High values mean the account keeps transacting
// with previously unseen accounts.
// ---------------------------------------------------------------------------

/// For each bin t with incoming activity, A = 1 - |N_t ∩ H| / |N_t ∪ H|
/// where H is the union of in-neighborhoods over bins [t - theta_a, t - 1],
/// clipped at the sub-dataset start. Bins without incoming activity are the
/// zero branch and stay implicit (sparse-series convention).
inline TimeSeries attractiveness_series(const TemporalGraph& g, std::uint32_t account,
                                        BlockNumber theta_a) {
  if (theta_a < 1) throw Error(Errc::BadHyperparameter, "theta_a must be >= 1");
  const auto& events = g.in_events(account);
  TimeSeries ts;
  if (events.empty()) return ts;

  // Distinct active bins with their neighbor sets, in ascending order.
  std::vector<std::pair<BlockNumber, std::set<std::uint32_t>>> bins;
  for (const Event& e : events) {
    if (bins.empty() || bins.back().first != e.bin) bins.push_back({e.bin, {}});
    bins.back().second.insert(e.counterparty);
  }

  std::size_t lo = 0;
  for (std::size_t t = 0; t < bins.size(); ++t) {
    const BlockNumber bin = bins[t].first;
    while (bins[lo].first < bin - theta_a) ++lo;
    std::set<std::uint32_t> history;
    for (std::size_t j = lo; j < t; ++j)
      history.insert(bins[j].second.begin(), bins[j].second.end());
    const std::set<std::uint32_t>& current = bins[t].second;
    std::size_t overlap = 0;
    for (std::uint32_t a : current) overlap += history.count(a);
    std::set<std::uint32_t> all = history;
    all.insert(current.begin(), current.end());
    ts.push(bin, 1.0 - static_cast<double>(overlap) / static_cast<double>(all.size()));
  }
  return ts;
}

// ---------------------------------------------------------------------------
// Bursts
// ---------------------------------------------------------------------------

/// Global and per-account burst thresholds. The 0.8 factor turns a per-account
/// maximum into the degree/balance/gasPrice cutoffs; theta_a <= 0 means "the
/// sub-dataset duration" (the whole history).
struct Thresholds {
  double theta_t = 2.0;
  double burst_factor = 0.8;
  BlockNumber theta_a = 0;
  std::optional<double> theta_d;
  std::optional<double> theta_b;
  std::optional<double> theta_g;

  BlockNumber resolve_theta_a(const TemporalGraph& g) const {
    if (theta_a >= 1) return theta_a;
    return std::max<BlockNumber>(1, g.end() - g.start());
  }
};

struct TemporalBurstStats {
  std::int64_t number_of_bursts = 0;
  BlockNumber longest_duration = 0;
};

/// A burst event is a transaction arriving sooner than theta_t blocks after
/// the previous same-direction transaction; a burst is a maximal run of
/// consecutive burst events. The run's duration includes the anchor
/// transaction the first gap is measured against.
inline TemporalBurstStats temporal_bursts(const TemporalGraph& g, std::uint32_t account,
                                          double theta_t, Direction dir) {
  const std::vector<BlockNumber> blocks = detail::direction_blocks(g, account, dir);
  if (blocks.empty())
    throw Error(Errc::NoTransactions, "account has no transactions in this direction");
  TemporalBurstStats stats;
  std::size_t k = 1;
  while (k < blocks.size()) {
    if (static_cast<double>(blocks[k] - blocks[k - 1]) < theta_t) {
      const BlockNumber anchor = blocks[k - 1];
      while (k < blocks.size() && static_cast<double>(blocks[k] - blocks[k - 1]) < theta_t) ++k;
      ++stats.number_of_bursts;
      stats.longest_duration = std::max(stats.longest_duration, blocks[k - 1] - anchor);
    } else {
      ++k;
    }
  }
  return stats;
}

struct DegreeBurstStats {
  std::int64_t number_of_bursts = 0;     // maximal runs of consecutive bursty bins
  std::int64_t number_of_instances = 0;  // bursty bins
  BlockNumber largest_burst_at = 0;      // bin of the maximum degree, earliest on ties
};

inline double default_theta_d(const TemporalGraph& g, std::uint32_t account, Direction dir,
                              double factor) {
  double mx = 0.0;
  for (const auto& p : g.degree_series(account, dir).points) mx = std::max(mx, p.second);
  return factor * mx;
}

inline DegreeBurstStats degree_bursts(const TemporalGraph& g, std::uint32_t account, Direction dir,
                                      std::optional<double> theta_d = std::nullopt,
                                      double factor = 0.8) {
  const TimeSeries series = g.degree_series(account, dir);
  if (series.empty())
    throw Error(Errc::NoTransactions, "account has no transactions in this direction");
  double mx = 0.0;
  BlockNumber mx_bin = series.points.front().first;
  for (const auto& [bin, deg] : series.points) {
    if (deg > mx) {
      mx = deg;
      mx_bin = bin;
    }
  }
  const double theta = theta_d ? *theta_d : factor * mx;

  DegreeBurstStats stats;
  stats.largest_burst_at = mx_bin;
  bool in_run = false;
  BlockNumber prev_bin = 0;
  for (const auto& [bin, deg] : series.points) {
    if (deg > theta) {
      ++stats.number_of_instances;
      if (!in_run || bin != prev_bin + 1) ++stats.number_of_bursts;
      in_run = true;
    } else {
      in_run = false;
    }
    prev_bin = bin;
  }
  return stats;
}

struct BalanceBurstStats {
  std::int64_t number_of_bursts = 0;            // transactions above theta_b
  std::int64_t number_of_bursty_instances = 0;  // distinct bins containing one
};

inline BalanceBurstStats balance_bursts(const TemporalGraph& g, std::uint32_t account,
                                        Direction dir,
                                        std::optional<double> theta_b = std::nullopt,
                                        double factor = 0.8) {
  const auto& events = dir == Direction::In ? g.in_events(account) : g.out_events(account);
  if (events.empty())
    throw Error(Errc::NoTransactions, "account has no transactions in this direction");
  double mx = 0.0;
  for (const Event& e : events) mx = std::max(mx, e.value);
  const double theta = theta_b ? *theta_b : factor * mx;

  BalanceBurstStats stats;
  std::set<BlockNumber> bins;
  for (const Event& e : events) {
    if (e.value > theta) {
      ++stats.number_of_bursts;
      bins.insert(e.bin);
    }
  }
  stats.number_of_bursty_instances = static_cast<std::int64_t>(bins.size());
  return stats;
}

/// Bins where the account set a gasPrice above theta_g. gasPrice is chosen by
/// the sender, so this runs over sent transactions.
inline std::int64_t gasprice_bursts(const TemporalGraph& g, std::uint32_t account,
                                    std::optional<double> theta_g = std::nullopt,
                                    double factor = 0.8) {
  const auto& events = g.out_events(account);
  if (events.empty()) throw Error(Errc::NoTransactions, "account has no sent transactions");
  double mx = 0.0;
  for (const Event& e : events) mx = std::max(mx, e.gas_price);
  const double theta = theta_g ? *theta_g : factor * mx;
  std::set<BlockNumber> bins;
  for (const Event& e : events)
    if (e.gas_price > theta) bins.insert(e.bin);
  return static_cast<std::int64_t>(bins.size());
}

// ---------------------------------------------------------------------------
// Balance features
// ---------------------------------------------------------------------------

struct BalanceFeatures {
  double max_in_balance = 0.0;
  double max_out_balance = 0.0;
  std::int64_t zero_balance_transactions = 0;
  double total_balance = 0.0;  // signed: external transactions only, no genesis balances
  double average_per_in_balance = 0.0;
};

inline BalanceFeatures balance_features(const TemporalGraph& g, std::uint32_t account) {
  BalanceFeatures bf;
  const auto& in = g.in_events(account);
  const auto& out = g.out_events(account);
  double in_sum = 0.0, out_sum = 0.0;
  for (const Event& e : in) {
    bf.max_in_balance = std::max(bf.max_in_balance, e.value);
    in_sum += e.value;
    if (e.value == 0.0) ++bf.zero_balance_transactions;
  }
  for (const Event& e : out) {
    bf.max_out_balance = std::max(bf.max_out_balance, e.value);
    out_sum += e.value;
    if (e.value == 0.0) ++bf.zero_balance_transactions;
  }
  bf.total_balance = in_sum - out_sum;
  if (!in.empty()) bf.average_per_in_balance = in_sum / static_cast<double>(in.size());
  return bf;
}

// ---------------------------------------------------------------------------
// Raw per-account time series handed to the statistic catalog
// ---------------------------------------------------------------------------

/// Per-bin sum of transferred value in the given direction.
inline TimeSeries balance_series(const TemporalGraph& g, std::uint32_t account, Direction dir) {
  const auto& events = dir == Direction::In ? g.in_events(account) : g.out_events(account);
  TimeSeries ts;
  for (std::size_t i = 0; i < events.size();) {
    const BlockNumber bin = events[i].bin;
    double sum = 0.0;
    while (i < events.size() && events[i].bin == bin) sum += events[i++].value;
    ts.push(bin, sum);
  }
  return ts;
}

/// Per-bin mean gasPrice over sent transactions.
inline TimeSeries gasprice_series(const TemporalGraph& g, std::uint32_t account) {
  const auto& events = g.out_events(account);
  TimeSeries ts;
  for (std::size_t i = 0; i < events.size();) {
    const BlockNumber bin = events[i].bin;
    double sum = 0.0, n = 0.0;
    while (i < events.size() && events[i].bin == bin) {
      sum += events[i++].gas_price;
      n += 1.0;
    }
    ts.push(bin, sum / n);
  }
  return ts;
}

/// Inter-event times of the merged transaction sequence, indexed by position.
inline TimeSeries iet_feature_series(const TemporalGraph& g, std::uint32_t account) {
  const std::vector<BlockNumber> blocks = detail::merged_blocks(g, account);
  TimeSeries ts;
  for (std::size_t k = 1; k < blocks.size(); ++k)
    ts.push(static_cast<BlockNumber>(k - 1),
            static_cast<double>(blocks[k] - blocks[k - 1]));
  return ts;
}

// ---------------------------------------------------------------------------
// Full per-account feature extraction
// ---------------------------------------------------------------------------

struct FeatureExtraction {
  std::vector<std::string> accounts;      // row order
  std::vector<std::string> columns;       // fixed column order
  std::vector<std::string> column_attrs;  // source attribute per column (series or scalar name)
  Matrix X;
  std::vector<std::string> warnings;  // imputation ledger
  Thresholds thresholds;
};

inline const std::vector<std::string>& feature_series_names() {
  static const std::vector<std::string> names = {
      "in_degree", "out_degree", "balance_in", "balance_out", "gas_price", "attractiveness",
      "iet"};
  return names;
}

inline std::vector<std::string> feature_scalar_names() {
  return {
      "transacted_first",
      "transacted_last",
      "duration_active",
      "active_since_last",
      "number_of_temporal_bursts_both",
      "number_of_temporal_bursts_in",
      "number_of_temporal_bursts_out",
      "longest_burst_duration_both",
      "longest_burst_duration_in",
      "longest_burst_duration_out",
      "number_of_degree_bursts_both",
      "number_of_degree_bursts_in",
      "number_of_degree_bursts_out",
      "number_of_degree_burst_instances",
      "largest_burst_at_both",
      "largest_burst_at_in",
      "largest_burst_at_out",
      "number_of_balance_bursts_in",
      "number_of_balance_bursts_out",
      "number_of_balance_bursty_instances_in",
      "number_of_balance_bursty_instances_out",
      "number_of_gasprice_bursty_instances",
      "max_in_balance",
      "max_out_balance",
      "zero_balance_transactions",
      "total_balance",
      "average_per_in_balance",
      "clustering_coefficient",
      "in_degree_agg",
      "out_degree_agg",
      "unique_in_degree",
  };
}

namespace detail {

inline void extract_row(const TemporalGraph& g, std::optional<std::uint32_t> node,
                        const Thresholds& th, const StatisticCatalog& catalog, double* row,
                        std::size_t width) {
  std::fill(row, row + width, 0.0);
  if (!node) return;
  const std::uint32_t a = *node;
  const BlockNumber theta_a = th.resolve_theta_a(g);
  std::size_t c = 0;

  auto put_series = [&](const TimeSeries& ts) {
    const std::vector<double> stats = summarize(ts, catalog);
    std::copy(stats.begin(), stats.end(), row + c);
    c += stats.size();
  };
  put_series(g.degree_series(a, Direction::In));
  put_series(g.degree_series(a, Direction::Out));
  put_series(balance_series(g, a, Direction::In));
  put_series(balance_series(g, a, Direction::Out));
  put_series(gasprice_series(g, a));
  put_series(attractiveness_series(g, a, theta_a));
  put_series(iet_feature_series(g, a));

  const ActiveState as = active_state(g, a);
  row[c++] = static_cast<double>(as.transacted_first);
  row[c++] = static_cast<double>(as.transacted_last);
  row[c++] = static_cast<double>(as.duration_active);
  row[c++] = static_cast<double>(as.active_since_last);

  const bool has_in = !g.in_events(a).empty();
  const bool has_out = !g.out_events(a).empty();
  for (Direction dir : {Direction::Both, Direction::In, Direction::Out}) {
    TemporalBurstStats tb{};
    if (dir == Direction::Both || (dir == Direction::In ? has_in : has_out))
      tb = temporal_bursts(g, a, th.theta_t, dir);
    row[c] = static_cast<double>(tb.number_of_bursts);
    row[c + 3] = static_cast<double>(tb.longest_duration);
    ++c;
  }
  c += 3;

  DegreeBurstStats db[3] = {};
  {
    int k = 0;
    for (Direction dir : {Direction::Both, Direction::In, Direction::Out}) {
      if (dir == Direction::Both || (dir == Direction::In ? has_in : has_out))
        db[k] = degree_bursts(g, a, dir, th.theta_d, th.burst_factor);
      ++k;
    }
  }
  for (int k = 0; k < 3; ++k) row[c++] = static_cast<double>(db[k].number_of_bursts);
  row[c++] = static_cast<double>(db[0].number_of_instances);
  for (int k = 0; k < 3; ++k) row[c++] = static_cast<double>(db[k].largest_burst_at);

  BalanceBurstStats bb_in{}, bb_out{};
  if (has_in) bb_in = balance_bursts(g, a, Direction::In, th.theta_b, th.burst_factor);
  if (has_out) bb_out = balance_bursts(g, a, Direction::Out, th.theta_b, th.burst_factor);
  row[c++] = static_cast<double>(bb_in.number_of_bursts);
  row[c++] = static_cast<double>(bb_out.number_of_bursts);
  row[c++] = static_cast<double>(bb_in.number_of_bursty_instances);
  row[c++] = static_cast<double>(bb_out.number_of_bursty_instances);
  row[c++] = has_out ? static_cast<double>(gasprice_bursts(g, a, th.theta_g, th.burst_factor)) : 0.0;

  const BalanceFeatures bf = balance_features(g, a);
  row[c++] = bf.max_in_balance;
  row[c++] = bf.max_out_balance;
  row[c++] = static_cast<double>(bf.zero_balance_transactions);
  row[c++] = bf.total_balance;
  row[c++] = bf.average_per_in_balance;

  row[c++] = g.clustering_coefficient(a, g.full_window());
  row[c++] = static_cast<double>(g.in_degree_agg(a));
  row[c++] = static_cast<double>(g.out_degree_agg(a));
  row[c++] = static_cast<double>(g.unique_in_degree(a));
}

}  // namespace detail

/// One row per account in the given order; fixed column order; rows for
/// accounts absent from the graph are imputed as zeros with a warning.
/// Row slots are independent, so the per-account work fans out across
/// threads without affecting the result.
inline FeatureExtraction extract_all(const TemporalGraph& g,
                                     const std::vector<std::string>& accounts,
                                     const Thresholds& thresholds,
                                     const StatisticCatalog& catalog,
                                     unsigned n_threads = std::thread::hardware_concurrency()) {
  FeatureExtraction fx;
  fx.accounts = accounts;
  fx.thresholds = thresholds;
  for (const std::string& series : feature_series_names()) {
    for (const std::string& stat : catalog.names()) {
      fx.columns.push_back(series + "__" + stat);
      fx.column_attrs.push_back(series);
    }
  }
  for (const std::string& scalar : feature_scalar_names()) {
    fx.columns.push_back(scalar);
    fx.column_attrs.push_back(scalar);
  }

  const std::size_t width = fx.columns.size();
  fx.X = Matrix(accounts.size(), width);

  std::vector<std::optional<std::uint32_t>> nodes(accounts.size());
  for (std::size_t r = 0; r < accounts.size(); ++r) nodes[r] = g.find(accounts[r]);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r)
      detail::extract_row(g, nodes[r], thresholds, catalog, fx.X.row(r), width);
  };
  const std::size_t n = accounts.size();
  if (n_threads <= 1 || n < 64) {
    work(0, n);
  } else {
    const unsigned t = std::min<unsigned>(n_threads, 16);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
      const std::size_t b = std::min<std::size_t>(n, i * chunk);
      const std::size_t e = std::min<std::size_t>(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t r = 0; r < accounts.size(); ++r)
    if (!nodes[r])
      fx.warnings.push_back("account '" + accounts[r] + "' absent from graph: row imputed as zeros");
  return fx;
}

}  // namespace blockwatch
