#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "blockwatch/graph.hpp"
#include "oracles.hpp"

using namespace blockwatch;
using oracles::tx;

TEST_CASE("build on empty and single-transaction sub-datasets") {
  SECTION("0 transactions -> 0 nodes") {
    const auto g = TemporalGraph::build(oracles::make_sd({}));
    CHECK(g.node_count() == 0);
    CHECK(g.event_count() == 0);
  }
  SECTION("1 transaction a->b -> 2 nodes, one out-event, one in-event") {
    const auto g = TemporalGraph::build(oracles::make_sd({tx(5, "a", "b")}));
    REQUIRE(g.node_count() == 2);
    CHECK(g.out_events(g.at("a")).size() == 1);
    CHECK(g.in_events(g.at("a")).empty());
    CHECK(g.in_events(g.at("b")).size() == 1);
    CHECK(g.out_events(g.at("b")).empty());
  }
  SECTION("self-loops are dropped at build time") {
    const auto g = TemporalGraph::build(oracles::make_sd({tx(5, "a", "a"), tx(6, "a", "b")}));
    CHECK(g.event_count() == 1);
    CHECK(g.out_events(g.at("a")).size() == 1);
  }
  SECTION("unknown account queries throw") {
    const auto g = TemporalGraph::build(oracles::make_sd({tx(5, "a", "b")}));
    CHECK_THROWS_AS(g.at("nope"), Error);
  }
}

static std::vector<Transaction> random_corpus(std::mt19937_64& g, std::size_t n,
                                              std::size_t accounts, BlockNumber span) {
  std::vector<Transaction> txs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = "a" + std::to_string(rng::below(g, accounts));
    auto b = "a" + std::to_string(rng::below(g, accounts));
    if (a == b) b = a + "x";
    txs.push_back(tx(static_cast<BlockNumber>(rng::below(g, span)), a, b,
                     static_cast<double>(rng::below(g, 100)),
                     static_cast<double>(rng::below(g, 50))));
  }
  return txs;
}

TEST_CASE("per-node event counts match a dictionary-of-lists oracle") {
  std::mt19937_64 g(21);
  const auto txs = random_corpus(g, 1000, 60, 500);
  const auto sd = oracles::make_sd(txs);
  const auto graph = TemporalGraph::build(sd);
  const auto naive = oracles::naive_events(sd.transactions);

  std::size_t naive_total = 0;
  for (const auto& [account, events] : naive.out) {
    REQUIRE(graph.find(account).has_value());
    CHECK(graph.out_events(graph.at(account)).size() == events.size());
    naive_total += events.size();
  }
  for (const auto& [account, events] : naive.in)
    CHECK(graph.in_events(graph.at(account)).size() == events.size());
  CHECK(graph.event_count() == naive_total);
}

TEST_CASE("mirror invariant: total in-events equal total out-events") {
  std::mt19937_64 g(22);
  const auto graph = TemporalGraph::build(oracles::make_sd(random_corpus(g, 500, 30, 300)));
  std::size_t in_total = 0, out_total = 0;
  for (std::uint32_t a = 0; a < graph.node_count(); ++a) {
    in_total += graph.in_events(a).size();
    out_total += graph.out_events(a).size();
  }
  CHECK(in_total == out_total);
  CHECK(in_total == graph.event_count());
}

TEST_CASE("neighborhood_in") {
  const auto graph = TemporalGraph::build(
      oracles::make_sd({tx(1, "x", "i"), tx(2, "y", "i"), tx(3, "x", "i"), tx(9, "i", "z")}));
  const auto i = graph.at("i");

  SECTION("no in-events -> empty set") {
    CHECK(graph.neighborhood_in(graph.at("x"), graph.full_window()).empty());
  }
  SECTION("whole-range window equals a full scan") {
    const auto got = graph.neighborhood_in(i, graph.full_window());
    REQUIRE(got.size() == 2);
    CHECK(graph.id(got[0]) == "x");
    CHECK(graph.id(got[1]) == "y");
  }
  SECTION("two windows partitioning the range union to the whole-range result") {
    const auto left = graph.neighborhood_in(i, {1, 3});
    const auto right = graph.neighborhood_in(i, {3, 10});
    std::set<std::uint32_t> all(left.begin(), left.end());
    all.insert(right.begin(), right.end());
    const auto whole = graph.neighborhood_in(i, {1, 10});
    CHECK(std::vector<std::uint32_t>(all.begin(), all.end()) == whole);
  }
}

TEST_CASE("neighborhood monotone under window growth") {
  std::mt19937_64 g(33);
  const auto graph = TemporalGraph::build(oracles::make_sd(random_corpus(g, 400, 25, 200)));
  for (std::uint32_t a = 0; a < graph.node_count(); a += 3) {
    std::size_t prev = 0;
    for (BlockNumber end = 50; end <= 200; end += 50) {
      const auto n = graph.neighborhood_in(a, {0, end}).size();
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("degree_series and aggregates") {
  const auto graph = TemporalGraph::build(oracles::make_sd(
      {tx(4, "x", "i"), tx(4, "x", "i"), tx(4, "y", "i"), tx(7, "i", "x")}));
  const auto i = graph.at("i");

  SECTION("three receipts in one block -> [(4,3)] and inDegreeAgg 3") {
    const auto ts = graph.degree_series(i, Direction::In);
    REQUIRE(ts.size() == 1);
    CHECK(ts.points[0] == std::make_pair<BlockNumber, double>(4, 3.0));
    CHECK(graph.in_degree_agg(i) == 3);
  }
  SECTION("uniqueInDegree counts distinct senders: {x,x,y} -> 2") {
    CHECK(graph.unique_in_degree(i) == 2);
  }
  SECTION("both-direction series merges bins") {
    const auto ts = graph.degree_series(i, Direction::Both);
    REQUIRE(ts.size() == 2);
    CHECK(ts.points[0].second == 3.0);
    CHECK(ts.points[1] == std::make_pair<BlockNumber, double>(7, 1.0));
  }
}

TEST_CASE("degree series match a per-bin counting oracle on a random corpus") {
  std::mt19937_64 g(44);
  const auto sd = oracles::make_sd(random_corpus(g, 800, 40, 250));
  const auto graph = TemporalGraph::build(sd);
  const auto naive = oracles::naive_events(sd.transactions);

  for (const auto& [account, events] : naive.in) {
    std::map<BlockNumber, double> bins;
    for (const auto& t : events) bins[t.block_number] += 1.0;
    const auto ts = graph.degree_series(graph.at(account), Direction::In);
    REQUIRE(ts.size() == bins.size());
    std::size_t k = 0;
    double total = 0.0;
    for (const auto& [bin, count] : bins) {
      CHECK(ts.points[k].first == bin);
      CHECK(ts.points[k].second == count);
      total += count;
      ++k;
    }
    CHECK(total == static_cast<double>(graph.in_degree_agg(graph.at(account))));
  }
}

TEST_CASE("per-bin in-degree summed over accounts equals transactions in the bin") {
  std::mt19937_64 g(45);
  const auto sd = oracles::make_sd(random_corpus(g, 600, 30, 100));
  const auto graph = TemporalGraph::build(sd);
  std::map<BlockNumber, double> from_series, from_txs;
  for (std::uint32_t a = 0; a < graph.node_count(); ++a)
    for (const auto& [bin, count] : graph.degree_series(a, Direction::In).points)
      from_series[bin] += count;
  for (const auto& t : sd.transactions)
    if (t.source != t.destination) from_txs[t.block_number] += 1.0;
  CHECK(from_series == from_txs);
}

TEST_CASE("clustering coefficient hand cases") {
  SECTION("deg_tot <= 1 -> 0") {
    const auto graph = TemporalGraph::build(oracles::make_sd({tx(1, "a", "i")}));
    CHECK(graph.clustering_coefficient(graph.at("i"), graph.full_window()) == 0.0);
  }
  SECTION("3-cycle i->r, r->s, s->i gives CC_i = 0.5") {
    const auto graph =
        TemporalGraph::build(oracles::make_sd({tx(1, "i", "r"), tx(2, "r", "s"), tx(3, "s", "i")}));
    CHECK(graph.clustering_coefficient(graph.at("i"), graph.full_window()) ==
          Catch::Approx(0.5).margin(1e-15));
  }
  SECTION("fully bidirectional triad gives CC = 1") {
    const auto graph = TemporalGraph::build(oracles::make_sd(
        {tx(1, "i", "r"), tx(1, "r", "i"), tx(2, "i", "s"), tx(2, "s", "i"), tx(3, "r", "s"),
         tx(3, "s", "r")}));
    CHECK(graph.clustering_coefficient(graph.at("i"), graph.full_window()) ==
          Catch::Approx(1.0).margin(1e-15));
  }
  SECTION("multi-edges count once for adjacency indicators") {
    const auto graph = TemporalGraph::build(oracles::make_sd(
        {tx(1, "i", "r"), tx(1, "i", "r"), tx(2, "r", "s"), tx(2, "r", "s"), tx(3, "s", "i")}));
    CHECK(graph.clustering_coefficient(graph.at("i"), graph.full_window()) ==
          Catch::Approx(0.5).margin(1e-15));
  }
}

TEST_CASE("clustering coefficient matches brute-force enumeration on random digraphs") {
  std::mt19937_64 g(55);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng::below(g, 10));
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    std::vector<Transaction> txs;
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) {
        if (r == s) continue;
        if (rng::uniform01(g) < 0.35) {
          adj[r][s] = 1;
          txs.push_back(tx(static_cast<BlockNumber>(1 + rng::below(g, 50)),
                           "n" + std::to_string(r), "n" + std::to_string(s)));
        }
      }
    }
    if (txs.empty()) continue;
    const auto graph = TemporalGraph::build(oracles::make_sd(txs));
    for (int i = 0; i < n; ++i) {
      const auto node = graph.find("n" + std::to_string(i));
      if (!node) continue;
      const double got = graph.clustering_coefficient(*node, graph.full_window());
      const double want = oracles::clustering_coefficient_oracle(adj, i);
      CHECK(got == Catch::Approx(want).margin(1e-12));
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
  }
}
