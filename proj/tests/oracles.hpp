// Test-only oracles, independent of the library's implementation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "blockwatch/matrix.hpp"
#include "blockwatch/rng.hpp"
#include "blockwatch/types.hpp"

namespace oracles {

using blockwatch::BlockNumber;
using blockwatch::Transaction;

inline Transaction tx(BlockNumber block, std::string src, std::string dst, double value = 1.0,
                      double gas_price = 20.0) {
  Transaction t;
  t.block_number = block;
  t.source = std::move(src);
  t.destination = std::move(dst);
  t.value = value;
  t.gas = 21000;
  t.gas_price = gas_price;
  return t;
}

inline blockwatch::SubDataset make_sd(std::vector<Transaction> txs) {
  blockwatch::SubDataset sd;
  std::stable_sort(txs.begin(), txs.end(),
                   [](const Transaction& a, const Transaction& b) {
                     return a.block_number < b.block_number;
                   });
  if (!txs.empty()) {
    sd.start = txs.front().block_number;
    sd.end = txs.back().block_number + 1;
  }
  std::set<std::string> accounts;
  for (const auto& t : txs) {
    accounts.insert(t.source);
    accounts.insert(t.destination);
  }
  sd.accounts.assign(accounts.begin(), accounts.end());
  sd.transactions = std::move(txs);
  return sd;
}

// Dictionary-of-lists reconstruction of per-account events from raw
// transactions (self-loops excluded, mirroring the build contract).
struct NaiveEvents {
  std::map<std::string, std::vector<Transaction>> in;
  std::map<std::string, std::vector<Transaction>> out;
};

inline NaiveEvents naive_events(const std::vector<Transaction>& txs) {
  NaiveEvents ev;
  for (const Transaction& t : txs) {
    if (t.source == t.destination) continue;
    ev.out[t.source].push_back(t);
    ev.in[t.destination].push_back(t);
  }
  return ev;
}

// Direct evaluation of the attractiveness definition over dense per-bin
// neighbor sets: A_t = 1 - |N_t ∩ H| / |N_t ∪ H| with H the union over the
// preceding theta_a bins clipped at 0; 0 for empty N_t.
inline std::vector<double> attractiveness_oracle(
    const std::vector<std::set<int>>& neighbor_sets, int theta_a) {
  std::vector<double> out(neighbor_sets.size(), 0.0);
  for (std::size_t t = 0; t < neighbor_sets.size(); ++t) {
    const std::set<int>& current = neighbor_sets[t];
    if (current.empty()) continue;
    std::set<int> history;
    const std::size_t lo = t >= static_cast<std::size_t>(theta_a) ? t - theta_a : 0;
    for (std::size_t j = lo; j < t; ++j)
      history.insert(neighbor_sets[j].begin(), neighbor_sets[j].end());
    std::set<int> all = history;
    all.insert(current.begin(), current.end());
    std::size_t overlap = 0;
    for (int a : current) overlap += history.count(a);
    out[t] = 1.0 - static_cast<double>(overlap) / static_cast<double>(all.size());
  }
  return out;
}

// Brute-force directed clustering coefficient over an adjacency matrix
// (0/1, no self-loops): every ordered pair (r, s) enumerated.
inline double clustering_coefficient_oracle(const std::vector<std::vector<int>>& adj, int i) {
  const int n = static_cast<int>(adj.size());
  std::set<int> nin, nout;
  for (int x = 0; x < n; ++x) {
    if (adj[x][i]) nin.insert(x);
    if (adj[i][x]) nout.insert(x);
  }
  const auto deg_tot = static_cast<double>(nin.size() + nout.size());
  if (deg_tot < 2) return 0.0;
  std::set<int> bil;
  for (int x : nin)
    if (nout.count(x)) bil.insert(x);
  const double denom = 2.0 * (deg_tot * (deg_tot - 1.0) - 2.0 * static_cast<double>(bil.size()));
  if (denom <= 0.0) return 0.0;
  double num = 0.0;
  for (int r = 0; r < n; ++r) {
    if (r == i) continue;
    for (int s = 0; s < n; ++s) {
      if (s == i || s == r) continue;
      num += static_cast<double>((adj[i][r] + adj[r][i]) * (adj[i][s] + adj[s][i]) *
                                 (adj[s][r] + adj[r][s]));
    }
  }
  return num / denom;
}

// Exhaustive threshold scan for the best gini-impurity decrease of a stump.
inline double gini_stump_oracle(const std::vector<double>& col, const std::vector<int>& y) {
  auto gini = [](double n0, double n1) {
    const double n = n0 + n1;
    if (n == 0) return 0.0;
    return 1.0 - (n0 / n) * (n0 / n) - (n1 / n) * (n1 / n);
  };
  std::vector<double> distinct = col;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double p0 = 0, p1 = 0;
  for (int v : y) (v ? p1 : p0) += 1;
  const double parent = gini(p0, p1);
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    const double t = (distinct[i] + distinct[i + 1]) / 2.0;
    double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
    for (std::size_t j = 0; j < col.size(); ++j) {
      if (col[j] <= t) (y[j] ? l1 : l0) += 1;
      else (y[j] ? r1 : r0) += 1;
    }
    const double n = p0 + p1;
    const double child = (l0 + l1) / n * gini(l0, l1) + (r0 + r1) / n * gini(r0, r1);
    best = std::max(best, parent - child);
  }
  return best;
}

// Gaussian blobs with known memberships.
struct Blobs {
  blockwatch::Matrix X;
  std::vector<int> membership;
};

inline Blobs make_blobs(int k, std::size_t n_per_blob, std::size_t dims, double separation,
                        double spread, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  Blobs b;
  b.X = blockwatch::Matrix(n_per_blob * k, dims);
  std::vector<std::vector<double>> centers;
  // Centers on a scaled simplex-ish layout: axis-aligned, pairwise distance
  // >= separation.
  for (int c = 0; c < k; ++c) {
    std::vector<double> center(dims, 0.0);
    center[c % dims] += separation * (1.0 + c / static_cast<double>(dims));
    centers.push_back(center);
  }
  std::size_t row = 0;
  for (int c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n_per_blob; ++i, ++row) {
      for (std::size_t d = 0; d < dims; ++d)
        b.X.at(row, d) = centers[c][d] + spread * blockwatch::rng::normal(g);
      b.membership.push_back(c);
    }
  }
  return b;
}

}  // namespace oracles
