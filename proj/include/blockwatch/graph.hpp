#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

enum class Direction { In, Out, Both };

/// Half-open block range used for windowed queries.
struct Window {
  BlockNumber start = 0;
  BlockNumber end = 0;

  bool contains(BlockNumber b) const { return b >= start && b < end; }
};

/// One adjacency event: a transaction seen from one account's side.
struct Event {
  BlockNumber bin = 0;
  std::uint32_t counterparty = 0;
  double value = 0.0;
  double gas_price = 0.0;
};

/// A SubDataset materialized as a directed temporal multigraph. Immutable
/// after build; every query is read-only and safe to run concurrently.
///
/// Self-loops (source == destination) are dropped at build time: they corrupt
/// both degree and clustering-coefficient semantics.
class TemporalGraph {
 public:
  static TemporalGraph build(const SubDataset& sub) {
    TemporalGraph g;
    g.start_ = sub.start;
    g.end_ = sub.end;
    for (const Transaction& tx : sub.transactions) {
      if (tx.source == tx.destination) continue;
      const std::uint32_t s = g.intern(tx.source);
      const std::uint32_t d = g.intern(tx.destination);
      g.out_[s].push_back({tx.block_number, d, tx.value, tx.gas_price});
      g.in_[d].push_back({tx.block_number, s, tx.value, tx.gas_price});
    }
    // Transactions arrive sorted by block, so event lists are already sorted.
    return g;
  }

  std::size_t node_count() const { return ids_.size(); }
  BlockNumber start() const { return start_; }
  BlockNumber end() const { return end_; }
  Window full_window() const { return {start_, end_}; }

  const std::string& id(std::uint32_t index) const { return ids_[index]; }

  std::optional<std::uint32_t> find(const std::string& account) const {
    auto it = index_.find(account);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t at(const std::string& account) const {
    auto idx = find(account);
    if (!idx) throw Error(Errc::UnknownAccount, "'" + account + "' not in graph");
    return *idx;
  }

  const std::vector<Event>& in_events(std::uint32_t a) const { return in_[a]; }
  const std::vector<Event>& out_events(std::uint32_t a) const { return out_[a]; }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& ev : out_) n += ev.size();
    return n;
  }

  /// Distinct senders to `account` with at least one transaction in `window`.
  std::vector<std::uint32_t> neighborhood_in(std::uint32_t account, Window window) const {
    return distinct_counterparties(in_[account], window);
  }

  /// Distinct receivers from `account` within `window`.
  std::vector<std::uint32_t> neighborhood_out(std::uint32_t account, Window window) const {
    return distinct_counterparties(out_[account], window);
  }

  /// Per-bin transaction counts for the account in the chosen direction.
  TimeSeries degree_series(std::uint32_t account, Direction dir) const {
    TimeSeries ts;
    if (dir == Direction::Both) {
      const auto& a = in_[account];
      const auto& b = out_[account];
      std::size_t i = 0, j = 0;
      while (i < a.size() || j < b.size()) {
        BlockNumber bin;
        if (j >= b.size() || (i < a.size() && a[i].bin <= b[j].bin)) bin = a[i].bin;
        else bin = b[j].bin;
        double count = 0;
        while (i < a.size() && a[i].bin == bin) ++count, ++i;
        while (j < b.size() && b[j].bin == bin) ++count, ++j;
        ts.push(bin, count);
      }
      return ts;
    }
    const auto& events = dir == Direction::In ? in_[account] : out_[account];
    for (std::size_t i = 0; i < events.size();) {
      const BlockNumber bin = events[i].bin;
      double count = 0;
      while (i < events.size() && events[i].bin == bin) ++count, ++i;
      ts.push(bin, count);
    }
    return ts;
  }

  /// Total received transactions.
  std::size_t in_degree_agg(std::uint32_t account) const { return in_[account].size(); }

  /// Total sent transactions.
  std::size_t out_degree_agg(std::uint32_t account) const { return out_[account].size(); }

  /// Distinct accounts this account ever received from.
  std::size_t unique_in_degree(std::uint32_t account) const {
    return distinct_counterparties(in_[account], full_window()).size();
  }

  /// Directed clustering coefficient (Fagiolo) over the adjacency restricted
  /// to `window`. Degenerate denominators yield 0 so the value is total.
  double clustering_coefficient(std::uint32_t account, Window window) const {
    const std::vector<std::uint32_t> nin = neighborhood_in(account, window);
    const std::vector<std::uint32_t> nout = neighborhood_out(account, window);
    const std::size_t deg_tot = nin.size() + nout.size();
    if (deg_tot < 2) return 0.0;

    std::vector<std::uint32_t> bilateral;
    std::set_intersection(nin.begin(), nin.end(), nout.begin(), nout.end(),
                          std::back_inserter(bilateral));
    const double denom = 2.0 * (static_cast<double>(deg_tot) * (deg_tot - 1) -
                                2.0 * static_cast<double>(bilateral.size()));
    if (denom <= 0.0) return 0.0;

    std::vector<std::uint32_t> nodes;
    std::set_union(nin.begin(), nin.end(), nout.begin(), nout.end(), std::back_inserter(nodes));

    std::unordered_set<std::uint32_t> node_set(nodes.begin(), nodes.end());
    std::unordered_set<std::uint64_t> edges;  // r -> s among neighbors, indicator semantics
    for (std::uint32_t r : nodes) {
      for (const Event& e : out_[r]) {
        if (!window.contains(e.bin)) continue;
        if (e.counterparty != account && node_set.count(e.counterparty))
          edges.insert((static_cast<std::uint64_t>(r) << 32) | e.counterparty);
      }
    }
    auto edge = [&edges](std::uint32_t x, std::uint32_t y) {
      return edges.count((static_cast<std::uint64_t>(x) << 32) | y) ? 1 : 0;
    };
    std::unordered_set<std::uint32_t> in_set(nin.begin(), nin.end());
    std::unordered_set<std::uint32_t> out_set(nout.begin(), nout.end());
    auto i_adj = [&](std::uint32_t x) {
      return (out_set.count(x) ? 1 : 0) + (in_set.count(x) ? 1 : 0);  // a_ix + a_xi
    };

    double numerator = 0.0;
    for (std::uint32_t r : nodes) {
      const int ir = i_adj(r);
      for (std::uint32_t s : nodes) {
        if (r == s) continue;
        numerator += static_cast<double>(ir) * i_adj(s) * (edge(s, r) + edge(r, s));
      }
    }
    return numerator / denom;
  }

  /// Debug dump rows: block_bin,source,destination,value,gas_price.
  std::vector<Transaction> edge_list() const {
    std::vector<Transaction> rows;
    for (std::uint32_t a = 0; a < out_.size(); ++a) {
      for (const Event& e : out_[a]) {
        Transaction tx;
        tx.block_number = e.bin;
        tx.source = ids_[a];
        tx.destination = ids_[e.counterparty];
        tx.value = e.value;
        tx.gas_price = e.gas_price;
        rows.push_back(std::move(tx));
      }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Transaction& a, const Transaction& b) {
      return a.block_number < b.block_number;
    });
    return rows;
  }

 private:
  std::uint32_t intern(const std::string& account) {
    auto it = index_.find(account);
    if (it != index_.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(ids_.size());
    index_.emplace(account, idx);
    ids_.push_back(account);
    in_.emplace_back();
    out_.emplace_back();
    return idx;
  }

  static std::vector<std::uint32_t> distinct_counterparties(const std::vector<Event>& events,
                                                            Window window) {
    std::set<std::uint32_t> s;
    for (const Event& e : events)
      if (window.contains(e.bin)) s.insert(e.counterparty);
    return {s.begin(), s.end()};
  }

  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<Event>> in_;
  std::vector<std::vector<Event>> out_;
  BlockNumber start_ = 0;
  BlockNumber end_ = 0;
};

}  // namespace blockwatch
