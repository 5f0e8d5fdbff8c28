// Regenerates the bundled synthetic fixture: 1000 accounts over 126000
// blocks (21 Day windows, 3 Week windows) with planted malicious behavior —
// bursty activity toward fresh counterparties, value and gasPrice spikes —
// against a benign background of steady transactions among stable partners.
//
// Usage: gen_fixture [output-dir]   (default data/fixture)

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blockwatch/csv.hpp"
#include "blockwatch/io.hpp"
#include "blockwatch/rng.hpp"
#include "blockwatch/types.hpp"

using namespace blockwatch;

namespace {

constexpr std::uint64_t kFixtureSeed = 0x5eedf1137;
constexpr int kAccounts = 1000;
constexpr BlockNumber kSpan = 126000;  // 21 Day sub-datasets

std::string account_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "acc%04d", i);
  return buf;
}

bool is_malicious(int i) { return i % 20 == 7; }  // 50 accounts
bool is_exchange(int i) { return i % 200 == 3; }  // 5 hubs

double benign_value(std::mt19937_64& g) { return std::exp(rng::normal(g) * 0.6); }

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data/fixture";
  std::mt19937_64 g(kFixtureSeed);

  std::vector<Transaction> txs;
  auto emit = [&txs](BlockNumber block, int src, int dst, double value, double gas_price) {
    Transaction tx;
    tx.block_number = block;
    tx.source = account_name(src);
    tx.destination = account_name(dst);
    tx.value = value;
    tx.gas = 21000;
    tx.gas_price = gas_price;
    txs.push_back(std::move(tx));
  };

  for (int i = 0; i < kAccounts; ++i) {
    if (is_malicious(i)) {
      // A few burst episodes: consecutive blocks, fresh counterparties,
      // occasional large transfers and bribed gas prices.
      const int episodes = 2 + static_cast<int>(rng::below(g, 3));
      for (int e = 0; e < episodes; ++e) {
        const BlockNumber start = static_cast<BlockNumber>(rng::below(g, kSpan - 100));
        const int length = 8 + static_cast<int>(rng::below(g, 25));
        for (int t = 0; t < length; ++t) {
          const BlockNumber block = start + t;
          int victim = static_cast<int>(rng::below(g, kAccounts));
          if (victim == i) victim = (victim + 1) % kAccounts;
          const bool big = rng::uniform01(g) < 0.2;
          const bool incoming = rng::uniform01(g) < 0.5;
          const double value = big ? 50.0 + rng::uniform01(g) * 150.0 : benign_value(g);
          const double gas_price = rng::uniform01(g) < 0.3 ? 120.0 + rng::uniform01(g) * 80.0
                                                           : 20.0 + rng::normal(g) * 2.0;
          if (incoming) emit(block, victim, i, value, 20.0 + rng::normal(g) * 2.0);
          else emit(block, i, victim, value, gas_price);
        }
      }
    } else {
      // Steady traffic with a stable partner circle.
      const int n_tx = 6 + static_cast<int>(rng::below(g, 10));
      BlockNumber block = static_cast<BlockNumber>(rng::below(g, 4000));
      for (int t = 0; t < n_tx && block < kSpan; ++t) {
        const int offset = 1 + static_cast<int>(rng::below(g, 3));
        int partner = (i + (rng::uniform01(g) < 0.5 ? offset : -offset) + kAccounts) % kAccounts;
        if (rng::uniform01(g) < 0.08) partner = static_cast<int>(rng::below(g, kAccounts));
        if (partner == i) partner = (i + 1) % kAccounts;
        const double value = rng::uniform01(g) < 0.05 ? 0.0 : benign_value(g);
        if (rng::uniform01(g) < 0.5) emit(block, i, partner, value, 20.0 + rng::normal(g) * 2.0);
        else emit(block, partner, i, value, 20.0 + rng::normal(g) * 2.0);
        block += 500 + static_cast<BlockNumber>(rng::below(g, 12000));
      }
    }
    if (is_exchange(i)) {
      // Hub inflow: many one-off senders, power-law-ish aggregate in-degree.
      const int inflow = 30 + static_cast<int>(rng::below(g, 170));
      for (int t = 0; t < inflow; ++t) {
        const int sender = static_cast<int>(rng::below(g, kAccounts));
        if (sender == i) continue;
        emit(static_cast<BlockNumber>(rng::below(g, kSpan)), sender, i, benign_value(g),
             20.0 + rng::normal(g) * 2.0);
      }
    }
  }

  std::stable_sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
    return a.block_number < b.block_number;
  });

  std::ostringstream tx_csv;
  tx_csv << "block_number,tx_hash,source,destination,value,gas,gas_price\n";
  for (std::size_t t = 0; t < txs.size(); ++t) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "0x%012zx", t);
    csv::write_record(tx_csv, {std::to_string(txs[t].block_number), hash, txs[t].source,
                               txs[t].destination, io::format_double(txs[t].value),
                               std::to_string(txs[t].gas), io::format_double(txs[t].gas_price)});
  }
  io::atomic_write_file(out_dir + "/transactions.csv", tx_csv.str());

  std::ostringstream label_csv;
  label_csv << "account,label,kind\n";
  for (int i = 0; i < kAccounts; ++i) {
    csv::write_record(label_csv, {account_name(i), is_malicious(i) ? "malicious" : "benign",
                                  i % 25 == 11 ? "SC" : "EOA"});
  }
  io::atomic_write_file(out_dir + "/labels.csv", label_csv.str());

  std::printf("wrote %zu transactions for %d accounts to %s\n", txs.size(), kAccounts,
              out_dir.c_str());
  return 0;
}
