#pragma once

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockwatch/csv.hpp"
#include "blockwatch/error.hpp"
#include "blockwatch/rng.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

enum class RecordFormat { Csv, JsonLines };

inline RecordFormat parse_record_format(const std::string& s) {
  if (s == "csv") return RecordFormat::Csv;
  if (s == "jsonl" || s == "json-lines") return RecordFormat::JsonLines;
  throw Error(Errc::ConfigError, "unknown record format '" + s + "'");
}

namespace detail {

inline double parse_nonnegative_real(const std::string& s, const char* field, std::size_t line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw Error(Errc::NonNumericValue,
                "line " + std::to_string(line) + ": field '" + field + "': non-numeric value \"" +
                    s + "\"");
  if (v < 0.0)
    throw Error(Errc::NonNumericValue, "line " + std::to_string(line) + ": field '" + field +
                                           "': negative value \"" + s + "\"");
  return v;
}

inline std::int64_t parse_nonnegative_int(const std::string& s, const char* field,
                                          std::size_t line) {
  const double v = parse_nonnegative_real(s, field, line);
  return static_cast<std::int64_t>(v);
}

inline Transaction transaction_from_fields(const std::string& block_number,
                                           const std::string& tx_hash, const std::string& source,
                                           const std::string& destination, const std::string& value,
                                           const std::string& gas, const std::string& gas_price,
                                           std::size_t line) {
  if (source.empty())
    throw Error(Errc::MissingField, "line " + std::to_string(line) + ": empty source");
  if (destination.empty())
    throw Error(Errc::MissingField, "line " + std::to_string(line) + ": empty destination");
  Transaction tx;
  tx.block_number = parse_nonnegative_int(block_number, "block_number", line);
  tx.tx_hash = tx_hash;
  tx.source = source;
  tx.destination = destination;
  tx.value = parse_nonnegative_real(value, "value", line);
  tx.gas = parse_nonnegative_int(gas, "gas", line);
  tx.gas_price = parse_nonnegative_real(gas_price, "gas_price", line);
  return tx;
}

inline std::string json_field_as_string(const nlohmann::json& j, const char* key,
                                        std::size_t line) {
  if (!j.contains(key))
    throw Error(Errc::MissingField,
                "line " + std::to_string(line) + ": missing field '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_string()) return v.template get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.template get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.template get<std::uint64_t>());
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.template get<double>());
    return buf;
  }
  throw Error(Errc::NonNumericValue,
              "line " + std::to_string(line) + ": field '" + key + "': not a scalar");
}

}  // namespace detail

/// Parses the canonical transaction schema
/// `block_number,tx_hash,source,destination,value,gas,gas_price` (tx_hash
/// optional) or the json-lines equivalent. Records come back sorted by
/// block_number, stable by input order within a block.
inline std::vector<Transaction> parse_transactions(std::istream& in,
                                                   RecordFormat format = RecordFormat::Csv) {
  std::vector<Transaction> txs;
  if (format == RecordFormat::Csv) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw Error(Errc::EmptyInput, "no header row");
    int col_block = -1, col_hash = -1, col_src = -1, col_dst = -1, col_value = -1, col_gas = -1,
        col_gas_price = -1;
    for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
      const std::string& h = fields[i];
      if (h == "block_number") col_block = i;
      else if (h == "tx_hash") col_hash = i;
      else if (h == "source") col_src = i;
      else if (h == "destination") col_dst = i;
      else if (h == "value") col_value = i;
      else if (h == "gas") col_gas = i;
      else if (h == "gas_price") col_gas_price = i;
    }
    for (const auto& [name, col] :
         {std::pair<const char*, int>{"block_number", col_block}, {"source", col_src},
          {"destination", col_dst}, {"value", col_value}, {"gas", col_gas},
          {"gas_price", col_gas_price}}) {
      if (col < 0) throw Error(Errc::MissingField, std::string("header lacks column '") + name + "'");
    }
    const std::size_t needed = static_cast<std::size_t>(
        std::max({col_block, col_hash, col_src, col_dst, col_value, col_gas, col_gas_price}) + 1);
    while (reader.next(fields)) {
      const std::size_t line = reader.line_number();
      if (fields.size() < needed)
        throw Error(Errc::MissingField,
                    "line " + std::to_string(line) + ": expected " + std::to_string(needed) +
                        " fields, got " + std::to_string(fields.size()));
      txs.push_back(detail::transaction_from_fields(
          fields[col_block], col_hash >= 0 ? fields[col_hash] : std::string{}, fields[col_src],
          fields[col_dst], fields[col_value], fields[col_gas], fields[col_gas_price], line));
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw Error(Errc::NonNumericValue,
                    "line " + std::to_string(line_no) + ": not a JSON object");
      txs.push_back(detail::transaction_from_fields(
          detail::json_field_as_string(j, "block_number", line_no),
          j.contains("tx_hash") ? detail::json_field_as_string(j, "tx_hash", line_no)
                                : std::string{},
          detail::json_field_as_string(j, "source", line_no),
          detail::json_field_as_string(j, "destination", line_no),
          detail::json_field_as_string(j, "value", line_no),
          detail::json_field_as_string(j, "gas", line_no),
          detail::json_field_as_string(j, "gas_price", line_no), line_no));
    }
  }
  if (txs.empty()) throw Error(Errc::EmptyInput, "no transaction records");
  std::stable_sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
    return a.block_number < b.block_number;
  });
  return txs;
}

/// Label file: CSV `account,label,kind`.
inline std::vector<AccountLabel> parse_labels(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(Errc::EmptyInput, "no header row");
  int col_account = -1, col_label = -1, col_kind = -1;
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    if (fields[i] == "account") col_account = i;
    else if (fields[i] == "label") col_label = i;
    else if (fields[i] == "kind") col_kind = i;
  }
  if (col_account < 0 || col_label < 0)
    throw Error(Errc::MissingField, "label header needs 'account' and 'label'");
  std::vector<AccountLabel> labels;
  std::set<std::string> seen;
  while (reader.next(fields)) {
    AccountLabel al;
    al.account = fields[col_account];
    al.label = parse_label(fields[col_label]);
    if (col_kind >= 0 && static_cast<std::size_t>(col_kind) < fields.size())
      al.kind = parse_account_kind(fields[col_kind]);
    if (!seen.insert(al.account).second)
      throw Error(Errc::ConfigError, "line " + std::to_string(reader.line_number()) +
                                         ": duplicate label for account '" + al.account + "'");
    labels.push_back(std::move(al));
  }
  if (labels.empty()) throw Error(Errc::EmptyInput, "no label records");
  return labels;
}

/// Tiles the block span of `transactions` into sub-datasets of the given
/// granularity. Windows anchor at the minimum observed block; the trailing
/// partial window is kept. All yields exactly one sub-dataset.
inline std::vector<SubDataset> segment(const std::vector<Transaction>& transactions,
                                       Granularity granularity) {
  if (transactions.empty()) throw Error(Errc::EmptyDataset, "no transactions to segment");
  const BlockNumber min_block = transactions.front().block_number;
  const BlockNumber max_block = transactions.back().block_number;
  const BlockNumber span_end = max_block + 1;
  const BlockNumber width =
      granularity == Granularity::All ? span_end - min_block : granularity_width(granularity);

  std::vector<SubDataset> sds;
  std::size_t pos = 0;
  for (BlockNumber start = min_block; start < span_end; start += width) {
    SubDataset sd;
    sd.granularity = granularity;
    sd.index = sds.size();
    sd.start = start;
    sd.end = std::min<BlockNumber>(start + width, span_end);
    while (pos < transactions.size() && transactions[pos].block_number < sd.end) {
      sd.transactions.push_back(transactions[pos]);
      ++pos;
    }
    std::set<std::string> accounts;
    for (const Transaction& tx : sd.transactions) {
      accounts.insert(tx.source);
      accounts.insert(tx.destination);
    }
    sd.accounts.assign(accounts.begin(), accounts.end());
    sds.push_back(std::move(sd));
  }
  return sds;
}

/// Random under-sampling of the benign class: malicious and unknown accounts
/// are kept, exactly `target_benign_count` benign accounts survive, chosen
/// uniformly. Deterministic for a fixed seed regardless of input order.
inline std::vector<AccountLabel> undersample_benign(const std::vector<AccountLabel>& labels,
                                                    std::size_t target_benign_count,
                                                    std::uint64_t seed) {
  std::vector<AccountLabel> kept;
  std::vector<AccountLabel> benign;
  for (const AccountLabel& al : labels) {
    if (al.label == Label::Benign) benign.push_back(al);
    else kept.push_back(al);
  }
  if (target_benign_count > benign.size())
    throw Error(Errc::TargetTooLarge, "target " + std::to_string(target_benign_count) + " > " +
                                          std::to_string(benign.size()) + " benign accounts");
  std::sort(benign.begin(), benign.end(),
            [](const AccountLabel& a, const AccountLabel& b) { return a.account < b.account; });
  std::mt19937_64 g(seed);
  for (std::size_t i : rng::sample_without_replacement(g, benign.size(), target_benign_count))
    kept.push_back(benign[i]);
  std::sort(kept.begin(), kept.end(),
            [](const AccountLabel& a, const AccountLabel& b) { return a.account < b.account; });
  return kept;
}

}  // namespace blockwatch
