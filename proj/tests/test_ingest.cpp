#include <map>
#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "blockwatch/ingest.hpp"
#include "blockwatch/io.hpp"
#include "oracles.hpp"

using namespace blockwatch;

TEST_CASE("parse_transactions reads well-formed csv sorted by block") {
  std::istringstream in(
      "block_number,tx_hash,source,destination,value,gas,gas_price\n"
      "30,h3,a,b,1.5,21000,20\n"
      "10,h1,b,c,2,21000,21\n"
      "20,h2,c,a,0,21000,19\n");
  const auto txs = parse_transactions(in);
  REQUIRE(txs.size() == 3);
  CHECK(txs[0].block_number == 10);
  CHECK(txs[0].source == "b");
  CHECK(txs[0].value == 2.0);
  CHECK(txs[1].block_number == 20);
  CHECK(txs[2].block_number == 30);
  CHECK(txs[2].tx_hash == "h3");
  CHECK(txs[2].gas == 21000);
  CHECK(txs[2].gas_price == 20.0);
}

TEST_CASE("parse_transactions keeps input order within a block") {
  std::istringstream in(
      "block_number,tx_hash,source,destination,value,gas,gas_price\n"
      "5,first,a,b,1,0,0\n"
      "5,second,a,c,1,0,0\n");
  const auto txs = parse_transactions(in);
  REQUIRE(txs.size() == 2);
  CHECK(txs[0].tx_hash == "first");
  CHECK(txs[1].tx_hash == "second");
}

TEST_CASE("negative value is a NonNumericValue error naming the line") {
  std::istringstream in(
      "block_number,tx_hash,source,destination,value,gas,gas_price\n"
      "10,h,a,b,1,0,0\n"
      "11,h,a,b,-5,0,0\n");
  try {
    parse_transactions(in);
    FAIL("expected NonNumericValue");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonNumericValue);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("value") != std::string::npos);
  }
}

TEST_CASE("non-numeric and missing fields are rejected") {
  std::istringstream bad_num(
      "block_number,tx_hash,source,destination,value,gas,gas_price\n"
      "x,h,a,b,1,0,0\n");
  CHECK_THROWS_AS(parse_transactions(bad_num), Error);

  std::istringstream no_col("block_number,source,destination,value,gas\na,b,c,1,0\n");
  try {
    parse_transactions(no_col);
    FAIL("expected MissingField");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingField);
  }

  std::istringstream empty("");
  try {
    parse_transactions(empty);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyInput);
  }
}

TEST_CASE("json-lines input equal in content to csv parses identically") {
  std::mt19937_64 g(7);
  std::ostringstream csv_text, jsonl_text;
  csv_text << "block_number,tx_hash,source,destination,value,gas,gas_price\n";
  for (int i = 0; i < 200; ++i) {
    const auto block = static_cast<long long>(rng::below(g, 5000));
    const auto src = "a" + std::to_string(rng::below(g, 40));
    const auto dst = "b" + std::to_string(rng::below(g, 40));
    const double value = static_cast<double>(rng::below(g, 1000)) / 8.0;
    const long long gas = 21000 + static_cast<long long>(rng::below(g, 100));
    const double gas_price = static_cast<double>(rng::below(g, 200)) / 2.0;
    csv_text << block << ",h" << i << ',' << src << ',' << dst << ','
             << io::format_double(value) << ',' << gas << ',' << io::format_double(gas_price)
             << "\n";
    jsonl_text << "{\"block_number\":" << block << ",\"tx_hash\":\"h" << i << "\",\"source\":\""
               << src << "\",\"destination\":\"" << dst << "\",\"value\":"
               << io::format_double(value) << ",\"gas\":" << gas
               << ",\"gas_price\":" << io::format_double(gas_price) << "}\n";
  }
  std::istringstream csv_in(csv_text.str()), jsonl_in(jsonl_text.str());
  const auto from_csv = parse_transactions(csv_in, RecordFormat::Csv);
  const auto from_jsonl = parse_transactions(jsonl_in, RecordFormat::JsonLines);
  REQUIRE(from_csv.size() == from_jsonl.size());
  for (std::size_t i = 0; i < from_csv.size(); ++i) {
    CHECK(from_csv[i].block_number == from_jsonl[i].block_number);
    CHECK(from_csv[i].tx_hash == from_jsonl[i].tx_hash);
    CHECK(from_csv[i].source == from_jsonl[i].source);
    CHECK(from_csv[i].destination == from_jsonl[i].destination);
    CHECK(from_csv[i].value == from_jsonl[i].value);
    CHECK(from_csv[i].gas == from_jsonl[i].gas);
    CHECK(from_csv[i].gas_price == from_jsonl[i].gas_price);
  }
}

static std::vector<Transaction> span_txs(BlockNumber lo, BlockNumber hi_exclusive) {
  // Transactions at both ends so the observed span is exactly [lo, hi).
  std::vector<Transaction> txs;
  txs.push_back(oracles::tx(lo, "a", "b"));
  txs.push_back(oracles::tx((lo + hi_exclusive) / 2, "b", "c"));
  txs.push_back(oracles::tx(hi_exclusive - 1, "c", "a"));
  return txs;
}

TEST_CASE("segment tiles the block span") {
  SECTION("blocks spanning [0, 18000) at Day -> 3 sub-datasets of width 6000") {
    const auto sds = segment(span_txs(0, 18000), Granularity::Day);
    REQUIRE(sds.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(sds[i].start == static_cast<BlockNumber>(i * 6000));
      CHECK(sds[i].end == static_cast<BlockNumber>((i + 1) * 6000));
      CHECK(sds[i].index == i);
    }
  }
  SECTION("All yields exactly one sub-dataset") {
    const auto sds = segment(span_txs(0, 18000), Granularity::All);
    REQUIRE(sds.size() == 1);
    CHECK(sds[0].start == 0);
    CHECK(sds[0].end == 18000);
    CHECK(sds[0].transactions.size() == 3);
  }
  SECTION("blocks spanning [0, 50000) at Week -> trailing partial window kept") {
    const auto sds = segment(span_txs(0, 50000), Granularity::Week);
    REQUIRE(sds.size() == 2);
    CHECK(sds[1].start == 42000);
    CHECK(sds[1].end == 50000);
  }
  SECTION("windows anchor at the dataset minimum block") {
    const auto sds = segment(span_txs(100, 6100), Granularity::Day);
    REQUIRE(sds.size() == 1);
    CHECK(sds[0].start == 100);
    CHECK(sds[0].end == 6100);
  }
  SECTION("empty input is an EmptyDataset error") {
    CHECK_THROWS_AS(segment({}, Granularity::Day), Error);
  }
}

TEST_CASE("segmentation tiling and multiplicity invariants on random corpora") {
  std::mt19937_64 g(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Transaction> txs;
    const auto offset = static_cast<BlockNumber>(rng::below(g, 10000));
    const std::size_t n = 50 + rng::below(g, 400);
    for (std::size_t i = 0; i < n; ++i)
      txs.push_back(oracles::tx(offset + static_cast<BlockNumber>(rng::below(g, 30000)),
                                "a" + std::to_string(rng::below(g, 20)),
                                "b" + std::to_string(rng::below(g, 20))));
    std::stable_sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
      return a.block_number < b.block_number;
    });
    for (Granularity gran : {Granularity::Day, Granularity::Week, Granularity::All}) {
      const auto sds = segment(txs, gran);
      std::size_t total = 0;
      BlockNumber expected_start = txs.front().block_number;
      for (const auto& sd : sds) {
        CHECK(sd.start == expected_start);  // contiguous tiling, no overlap
        expected_start = sd.end;
        total += sd.transactions.size();
        for (const auto& t : sd.transactions) {
          CHECK(t.block_number >= sd.start);
          CHECK(t.block_number < sd.end);
        }
      }
      CHECK(expected_start == txs.back().block_number + 1);
      CHECK(total == txs.size());
    }
  }
}

static std::vector<AccountLabel> make_labels(int malicious, int benign) {
  std::vector<AccountLabel> labels;
  for (int i = 0; i < malicious; ++i)
    labels.push_back({"mal" + std::to_string(i), Label::Malicious, AccountKind::EOA});
  for (int i = 0; i < benign; ++i)
    labels.push_back({"ben" + std::to_string(i), Label::Benign, AccountKind::EOA});
  return labels;
}

TEST_CASE("undersample_benign keeps malicious and samples benign") {
  const auto labels = make_labels(10, 100);
  const auto sampled = undersample_benign(labels, 20, 1);
  std::size_t mal = 0, ben = 0;
  for (const auto& al : sampled) (al.label == Label::Malicious ? mal : ben) += 1;
  CHECK(mal == 10);
  CHECK(ben == 20);

  const auto again = undersample_benign(labels, 20, 1);
  REQUIRE(sampled.size() == again.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) CHECK(sampled[i].account == again[i].account);

  CHECK_THROWS_AS(undersample_benign(labels, 101, 1), Error);
}

TEST_CASE("undersample_benign draws uniformly across seeds") {
  const auto labels = make_labels(0, 100);
  std::map<std::string, int> hits;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    for (const auto& al : undersample_benign(labels, 20, static_cast<std::uint64_t>(seed)))
      ++hits[al.account];
  }
  for (const auto& [account, count] : hits) {
    const double freq = static_cast<double>(count) / trials;
    INFO(account << " freq " << freq);
    CHECK(freq > 0.18);
    CHECK(freq < 0.22);
  }
}

TEST_CASE("parse_labels reads account,label,kind and rejects duplicates") {
  std::istringstream in("account,label,kind\nx,malicious,EOA\ny,benign,SC\nz,unknown,unknown\n");
  const auto labels = parse_labels(in);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0].label == Label::Malicious);
  CHECK(labels[1].kind == AccountKind::SC);
  CHECK(labels[2].label == Label::Unknown);

  std::istringstream dup("account,label,kind\nx,malicious,EOA\nx,benign,EOA\n");
  CHECK_THROWS_AS(parse_labels(dup), Error);
}
