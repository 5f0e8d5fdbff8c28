#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blockwatch/error.hpp"

namespace blockwatch {

/// Block height doubles as the timestamp; the time bin is one block.
using BlockNumber = std::int64_t;

/// One directed value transfer. `value` and `gas_price` are kept as doubles:
/// wei-scale amounts overflow 64-bit integers and every consumer is
/// real-valued feature math.
struct Transaction {
  BlockNumber block_number = 0;
  std::string tx_hash;
  std::string source;
  std::string destination;
  double value = 0.0;
  std::int64_t gas = 0;
  double gas_price = 0.0;
};

enum class Label { Malicious, Benign, Unknown };
enum class AccountKind { EOA, SC, Unknown };

inline const char* label_name(Label l) {
  switch (l) {
    case Label::Malicious: return "malicious";
    case Label::Benign: return "benign";
    case Label::Unknown: return "unknown";
  }
  return "unknown";
}

inline Label parse_label(const std::string& s) {
  if (s == "malicious") return Label::Malicious;
  if (s == "benign") return Label::Benign;
  if (s == "unknown" || s.empty()) return Label::Unknown;
  throw Error(Errc::ConfigError, "unknown label '" + s + "'");
}

inline const char* account_kind_name(AccountKind k) {
  switch (k) {
    case AccountKind::EOA: return "EOA";
    case AccountKind::SC: return "SC";
    case AccountKind::Unknown: return "unknown";
  }
  return "unknown";
}

inline AccountKind parse_account_kind(const std::string& s) {
  if (s == "EOA" || s == "eoa") return AccountKind::EOA;
  if (s == "SC" || s == "sc") return AccountKind::SC;
  if (s == "unknown" || s.empty()) return AccountKind::Unknown;
  throw Error(Errc::ConfigError, "unknown account kind '" + s + "'");
}

struct AccountLabel {
  std::string account;
  Label label = Label::Unknown;
  AccountKind kind = AccountKind::Unknown;
};

// ---------------------------------------------------------------------------
// Temporal granularities. A Day window is 6000 blocks (roughly one day of
// Ethereum block production); coarser windows are exact multiples.
// ---------------------------------------------------------------------------

enum class Granularity { Day, Week, Month, Quarter, HalfYearly, Year, All };

/// Window width in blocks; 0 means "the entire span".
inline BlockNumber granularity_width(Granularity g) {
  switch (g) {
    case Granularity::Day: return 6000;
    case Granularity::Week: return 42000;
    case Granularity::Month: return 180000;
    case Granularity::Quarter: return 540000;
    case Granularity::HalfYearly: return 1080000;
    case Granularity::Year: return 2160000;
    case Granularity::All: return 0;
  }
  return 0;
}

inline const char* granularity_name(Granularity g) {
  switch (g) {
    case Granularity::Day: return "Day";
    case Granularity::Week: return "Week";
    case Granularity::Month: return "Month";
    case Granularity::Quarter: return "Quarter";
    case Granularity::HalfYearly: return "HalfYearly";
    case Granularity::Year: return "Year";
    case Granularity::All: return "All";
  }
  return "All";
}

inline Granularity parse_granularity(const std::string& s) {
  for (Granularity g : {Granularity::Day, Granularity::Week, Granularity::Month,
                        Granularity::Quarter, Granularity::HalfYearly, Granularity::Year,
                        Granularity::All}) {
    if (s == granularity_name(g)) return g;
  }
  throw Error(Errc::ConfigError, "unknown granularity '" + s + "'");
}

/// One temporal window of the dataset: transactions with block_number in
/// [start, end), sorted by block.
struct SubDataset {
  Granularity granularity = Granularity::All;
  std::size_t index = 0;
  BlockNumber start = 0;
  BlockNumber end = 0;
  std::vector<Transaction> transactions;
  std::vector<std::string> accounts;  // distinct, sorted
};

// ---------------------------------------------------------------------------
// Sparse time series: (block_bin, value) with strictly increasing bins.
// Missing bins are zero by convention; statistics run over stored points.
// ---------------------------------------------------------------------------

struct TimeSeries {
  std::vector<std::pair<BlockNumber, double>> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void push(BlockNumber bin, double value) { points.emplace_back(bin, value); }

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.second);
    return v;
  }
};

}  // namespace blockwatch
