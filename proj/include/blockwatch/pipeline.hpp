#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockwatch/behavior.hpp"
#include "blockwatch/config.hpp"
#include "blockwatch/csv.hpp"
#include "blockwatch/error.hpp"
#include "blockwatch/extratrees.hpp"
#include "blockwatch/features.hpp"
#include "blockwatch/graph.hpp"
#include "blockwatch/ingest.hpp"
#include "blockwatch/io.hpp"
#include "blockwatch/kmeans.hpp"
#include "blockwatch/metrics.hpp"
#include "blockwatch/powerlaw.hpp"
#include "blockwatch/rng.hpp"
#include "blockwatch/select.hpp"
#include "blockwatch/suspects.hpp"

namespace blockwatch::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Canonical stores
// ---------------------------------------------------------------------------

inline std::string transactions_to_csv(const std::vector<Transaction>& txs) {
  std::ostringstream out;
  out << "block_number,tx_hash,source,destination,value,gas,gas_price\n";
  for (const Transaction& tx : txs) {
    csv::write_record(out, {std::to_string(tx.block_number), tx.tx_hash, tx.source,
                            tx.destination, io::format_double(tx.value), std::to_string(tx.gas),
                            io::format_double(tx.gas_price)});
  }
  return out.str();
}

inline std::string labels_to_csv(const std::vector<AccountLabel>& labels) {
  std::ostringstream out;
  out << "account,label,kind\n";
  for (const AccountLabel& al : labels)
    csv::write_record(out, {al.account, label_name(al.label), account_kind_name(al.kind)});
  return out.str();
}

/// Prefer the canonical store written by `ingest`; fall back to the raw input.
inline std::vector<Transaction> load_transactions(const PipelineConfig& cfg, const fs::path& out) {
  const fs::path canonical = out / "transactions.csv";
  if (fs::exists(canonical)) {
    std::istringstream in(io::read_file(canonical));
    return parse_transactions(in, RecordFormat::Csv);
  }
  if (cfg.transactions.empty())
    throw Error(Errc::ConfigError, "no 'transactions' input configured");
  if (!fs::exists(cfg.transactions))
    throw Error(Errc::IoError, "missing input file '" + cfg.transactions + "'");
  std::istringstream in(io::read_file(cfg.transactions));
  return parse_transactions(in, parse_record_format(cfg.format));
}

inline std::vector<AccountLabel> load_labels(const PipelineConfig& cfg, const fs::path& out) {
  const fs::path canonical = out / "labels.csv";
  if (fs::exists(canonical)) {
    std::istringstream in(io::read_file(canonical));
    return parse_labels(in);
  }
  if (cfg.labels.empty()) throw Error(Errc::ConfigError, "no 'labels' input configured");
  if (!fs::exists(cfg.labels))
    throw Error(Errc::IoError, "missing input file '" + cfg.labels + "'");
  std::istringstream in(io::read_file(cfg.labels));
  return parse_labels(in);
}

inline std::map<std::string, Label> label_map(const std::vector<AccountLabel>& labels) {
  std::map<std::string, Label> m;
  for (const AccountLabel& al : labels) m[al.account] = al.label;
  return m;
}

// ---------------------------------------------------------------------------
// ingest / segment
// ---------------------------------------------------------------------------

inline json segmentation_manifest(const std::vector<Transaction>& txs,
                                  const std::vector<Granularity>& granularities) {
  json manifest;
  manifest["transactions"] = txs.size();
  manifest["block_range"] = {txs.front().block_number, txs.back().block_number + 1};
  json per_gran = json::object();
  for (Granularity g : granularities) {
    json sds = json::array();
    for (const SubDataset& sd : segment(txs, g)) {
      sds.push_back({{"index", sd.index},
                     {"start", sd.start},
                     {"end", sd.end},
                     {"transactions", sd.transactions.size()},
                     {"accounts", sd.accounts.size()}});
    }
    per_gran[granularity_name(g)] = std::move(sds);
  }
  manifest["granularities"] = std::move(per_gran);
  return manifest;
}

/// Parse + validate inputs, persist the canonical stores and the
/// segmentation manifest.
inline void run_ingest(const PipelineConfig& cfg, const fs::path& out) {
  if (cfg.transactions.empty())
    throw Error(Errc::ConfigError, "no 'transactions' input configured");
  if (!fs::exists(cfg.transactions))
    throw Error(Errc::IoError, "missing input file '" + cfg.transactions + "'");
  std::istringstream tin(io::read_file(cfg.transactions));
  const std::vector<Transaction> txs = parse_transactions(tin, parse_record_format(cfg.format));
  io::atomic_write_file(out / "transactions.csv", transactions_to_csv(txs));

  if (!cfg.labels.empty()) {
    if (!fs::exists(cfg.labels))
      throw Error(Errc::IoError, "missing input file '" + cfg.labels + "'");
    std::istringstream lin(io::read_file(cfg.labels));
    std::vector<AccountLabel> labels = parse_labels(lin);
    if (cfg.undersample_target > 0)
      labels = undersample_benign(labels, cfg.undersample_target,
                                  rng::derive_seed(cfg.seed, "undersample"));
    io::atomic_write_file(out / "labels.csv", labels_to_csv(labels));
  }

  io::atomic_write_file(out / "manifest.json",
                        segmentation_manifest(txs, cfg.granularities).dump(2) + "\n");
}

inline void run_segment(const PipelineConfig& cfg, const fs::path& out) {
  const std::vector<Transaction> txs = load_transactions(cfg, out);
  io::atomic_write_file(out / "manifest.json",
                        segmentation_manifest(txs, cfg.granularities).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

struct LabeledMatrix {
  std::vector<std::string> accounts;
  std::vector<Label> labels;
  std::vector<std::string> columns;
  Matrix X;
};

inline std::string matrix_to_csv(const LabeledMatrix& m) {
  std::ostringstream out;
  std::vector<std::string> header = {"account", "label"};
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  csv::write_record(out, header);
  for (std::size_t r = 0; r < m.X.rows; ++r) {
    std::vector<std::string> rec = {m.accounts[r], label_name(m.labels[r])};
    for (std::size_t c = 0; c < m.X.cols; ++c) rec.push_back(io::format_double(m.X.at(r, c)));
    csv::write_record(out, rec);
  }
  return out.str();
}

inline LabeledMatrix matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() < 2 || fields[0] != "account" ||
      fields[1] != "label")
    throw Error(Errc::SchemaMismatch, "expected a feature matrix CSV (account,label,...)");
  LabeledMatrix m;
  m.columns.assign(fields.begin() + 2, fields.end());
  std::vector<std::vector<double>> rows;
  while (reader.next(fields)) {
    if (fields.size() != m.columns.size() + 2)
      throw Error(Errc::SchemaMismatch,
                  "line " + std::to_string(reader.line_number()) + ": wrong field count");
    m.accounts.push_back(fields[0]);
    m.labels.push_back(parse_label(fields[1]));
    std::vector<double> row(m.columns.size());
    for (std::size_t c = 0; c < m.columns.size(); ++c) row[c] = std::stod(fields[c + 2]);
    rows.push_back(std::move(row));
  }
  m.X = Matrix(rows.size(), m.columns.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), m.X.row(r));
  return m;
}

inline Thresholds thresholds_from_config(const PipelineConfig& cfg) {
  Thresholds th;
  th.theta_t = cfg.theta_t;
  th.burst_factor = cfg.burst_factor;
  th.theta_a = cfg.theta_a;
  return th;
}

inline LabeledMatrix features_for_sd(const SubDataset& sd,
                                     const std::map<std::string, Label>& labels,
                                     const Thresholds& th, const StatisticCatalog& catalog,
                                     std::vector<std::string>* warnings = nullptr) {
  const TemporalGraph g = TemporalGraph::build(sd);
  const FeatureExtraction fx = extract_all(g, sd.accounts, th, catalog);
  LabeledMatrix m;
  m.accounts = fx.accounts;
  m.columns = fx.columns;
  m.X = fx.X;
  m.labels.reserve(sd.accounts.size());
  for (const std::string& a : sd.accounts) {
    auto it = labels.find(a);
    m.labels.push_back(it == labels.end() ? Label::Unknown : it->second);
  }
  if (warnings) warnings->insert(warnings->end(), fx.warnings.begin(), fx.warnings.end());
  return m;
}

inline std::string sd_tag(Granularity g, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return std::string(granularity_name(g)) + "_" + buf;
}

/// Extract matrices for one granularity (all sub-datasets, or a single
/// index). Emits features_<tag>.csv plus a schema sidecar per sub-dataset.
inline void run_features(const PipelineConfig& cfg, const fs::path& out, Granularity granularity,
                         long sd_index = -1) {
  const std::vector<Transaction> txs = load_transactions(cfg, out);
  const std::map<std::string, Label> labels = label_map(load_labels(cfg, out));
  const Thresholds th = thresholds_from_config(cfg);
  const StatisticCatalog catalog = cfg.statistic_catalog();

  for (const SubDataset& sd : segment(txs, granularity)) {
    if (sd_index >= 0 && sd.index != static_cast<std::size_t>(sd_index)) continue;
    std::vector<std::string> warnings;
    const LabeledMatrix m = features_for_sd(sd, labels, th, catalog, &warnings);
    const std::string tag = sd_tag(granularity, sd.index);
    io::atomic_write_file(out / ("features_" + tag + ".csv"), matrix_to_csv(m));

    json schema;
    schema["sub_dataset"] = {{"granularity", granularity_name(granularity)},
                             {"index", sd.index},
                             {"start", sd.start},
                             {"end", sd.end}};
    schema["columns"] = m.columns;
    {
      json provenance = json::array();
      for (const std::string& series : feature_series_names())
        for (const std::string& stat : catalog.names())
          provenance.push_back({{"series", series}, {"statistic", stat}});
      for (const std::string& scalar : feature_scalar_names())
        provenance.push_back({{"scalar", scalar}});
      schema["provenance"] = std::move(provenance);
    }
    schema["thresholds"] = {{"theta_t", th.theta_t},
                            {"burst_factor", th.burst_factor},
                            {"theta_a", th.theta_a},
                            {"theta_a_resolved", th.theta_a >= 1 ? th.theta_a : sd.end - sd.start}};
    schema["warnings"] = warnings;
    io::atomic_write_file(out / ("schema_" + tag + ".json"), schema.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

inline LabeledMatrix load_matrix(const fs::path& path) {
  if (!fs::exists(path))
    throw Error(Errc::IoError, "missing '" + path.string() + "' (run the previous stage first)");
  return matrix_from_csv(io::read_file(path));
}

inline std::vector<int> binary_labels(const std::vector<Label>& labels) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (Label l : labels) y.push_back(l == Label::Malicious ? 1 : 0);
  return y;
}

/// Gini top-k per attribute -> Pearson prune -> PCA. Rows with unknown labels
/// are excluded from scoring but kept in the emitted matrices.
inline void run_select(const PipelineConfig& cfg, const fs::path& out, Granularity granularity,
                       std::size_t sd_index = 0) {
  const LabeledMatrix m = load_matrix(out / ("features_" + sd_tag(granularity, sd_index) + ".csv"));

  std::vector<std::size_t> labeled_rows;
  for (std::size_t r = 0; r < m.labels.size(); ++r)
    if (m.labels[r] != Label::Unknown) labeled_rows.push_back(r);
  if (labeled_rows.empty()) throw Error(Errc::SingleClassInput, "no labeled rows");

  const Matrix Xl = m.X.select_rows(labeled_rows);
  std::vector<int> yl;
  for (std::size_t r : labeled_rows) yl.push_back(m.labels[r] == Label::Malicious ? 1 : 0);

  // Column attribute = series name for catalog stats, the column itself for scalars.
  std::vector<std::string> attrs;
  attrs.reserve(m.columns.size());
  for (const std::string& col : m.columns) {
    const auto sep = col.find("__");
    attrs.push_back(sep == std::string::npos ? col : col.substr(0, sep));
  }

  const std::vector<double> scores = gini_scores(Xl, yl);
  const std::vector<std::size_t> top3 =
      top_k_per_attribute(attrs, scores, static_cast<std::size_t>(cfg.gini_top_k));

  LabeledMatrix m_top3;
  m_top3.accounts = m.accounts;
  m_top3.labels = m.labels;
  for (std::size_t c : top3) m_top3.columns.push_back(m.columns[c]);
  m_top3.X = m.X.select_columns(top3);
  io::atomic_write_file(out / "top3.csv", matrix_to_csv(m_top3));

  const CorrelationPruneResult prune = correlation_prune(m_top3.X, cfg.correlation_threshold);
  LabeledMatrix m_pruned;
  m_pruned.accounts = m.accounts;
  m_pruned.labels = m.labels;
  for (std::size_t c : prune.retained) m_pruned.columns.push_back(m_top3.columns[c]);
  m_pruned.X = m_top3.X.select_columns(prune.retained);
  io::atomic_write_file(out / "pruned.csv", matrix_to_csv(m_pruned));

  const Standardization std_pruned = standardize(m_pruned.X);
  const PcaResult pca = pca_reduce(std_pruned.X, cfg.pca_variance_target);
  LabeledMatrix m_pca;
  m_pca.accounts = m.accounts;
  m_pca.labels = m.labels;
  for (std::size_t i = 0; i < pca.n_components; ++i)
    m_pca.columns.push_back("pc" + std::to_string(i));
  m_pca.X = pca.transformed;
  io::atomic_write_file(out / "pca.csv", matrix_to_csv(m_pca));

  json report;
  {
    json per_attr = json::object();
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < attrs.size(); ++c) groups[attrs[c]].push_back(c);
    for (auto& [attr, cols] : groups) {
      std::stable_sort(cols.begin(), cols.end(),
                       [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
      json ranked = json::array();
      for (std::size_t i = 0; i < cols.size() && i < static_cast<std::size_t>(cfg.gini_top_k); ++i)
        ranked.push_back({{"column", m.columns[cols[i]]}, {"gini_score", scores[cols[i]]}});
      per_attr[attr] = std::move(ranked);
    }
    report["gini_top_k"] = std::move(per_attr);
  }
  {
    json drops = json::array();
    for (const CorrelationDrop& d : prune.drops)
      drops.push_back({{"dropped", m_top3.columns[d.dropped]},
                       {"against", m_top3.columns[d.against]},
                       {"r", d.r}});
    report["correlation_drops"] = std::move(drops);
    report["correlation_threshold"] = cfg.correlation_threshold;
  }
  {
    report["pca"] = {{"variance_target", cfg.pca_variance_target},
                     {"n_components", pca.n_components},
                     {"explained_ratio", pca.explained_ratio}};
    json loadings = json::array();
    for (std::size_t i = 0; i < pca.n_components; ++i) {
      json row = json::array();
      for (std::size_t c = 0; c < pca.components.cols; ++c)
        row.push_back(pca.components.at(i, c));
      loadings.push_back(std::move(row));
    }
    report["pca"]["loadings"] = std::move(loadings);
  }
  report["counts"] = {{"raw", m.columns.size()},
                      {"top3", m_top3.columns.size()},
                      {"pruned", m_pruned.columns.size()},
                      {"pca", pca.n_components}};
  io::atomic_write_file(out / "selection.json", report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

inline std::vector<std::size_t> activity_date_columns(const std::vector<std::string>& columns) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == "transacted_first" || columns[c] == "transacted_last") cols.push_back(c);
  return cols;
}

inline void run_cluster(const PipelineConfig& cfg, const fs::path& out) {
  const LabeledMatrix m = load_matrix(out / "pruned.csv");
  const Standardization std_m = standardize(m.X);

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.kmeans_seeds_per_k; ++i)
    seeds.push_back(rng::derive_seed(cfg.seed, "kmeans", static_cast<std::uint64_t>(i)));

  const SweepResult sweep = sweep_k(std_m.X, cfg.kmeans_k_min, cfg.kmeans_k_max, seeds);
  {
    std::ostringstream table;
    table << "k,seed,silhouette,inertia\n";
    for (const SweepRow& row : sweep.rows)
      table << row.k << ',' << row.seed << ',' << io::format_double(row.silhouette) << ','
            << io::format_double(row.inertia) << "\n";
    io::atomic_write_file(out / "sweep.csv", table.str());
  }

  const ClusterModel model = kmeans_fit(std_m.X, sweep.best_k, sweep.best_seed);
  {
    std::ostringstream cent;
    std::vector<std::string> header = {"cluster"};
    header.insert(header.end(), m.columns.begin(), m.columns.end());
    csv::write_record(cent, header);
    for (int c = 0; c < model.k; ++c) {
      std::vector<std::string> rec = {std::to_string(c)};
      for (std::size_t j = 0; j < model.centroids.cols; ++j)
        rec.push_back(io::format_double(model.centroids.at(c, j)));
      csv::write_record(cent, rec);
    }
    io::atomic_write_file(out / "centroids.csv", cent.str());
  }

  std::vector<bool> malicious(m.labels.size());
  for (std::size_t r = 0; r < m.labels.size(); ++r)
    malicious[r] = m.labels[r] == Label::Malicious;
  const SuspectReport suspects = flag_suspects(model, std_m.X, malicious, cfg.epsilon,
                                               activity_date_columns(m.columns));
  json report;
  report["best_k"] = sweep.best_k;
  report["best_silhouette"] = sweep.best_score;
  report["seed"] = sweep.best_seed;
  report["epsilon"] = cfg.epsilon;
  report["cluster"] = suspects.cluster;
  report["malicious_members"] = suspects.malicious_members;
  json flagged = json::array();
  for (std::size_t i = 0; i < suspects.flagged_rows.size(); ++i)
    flagged.push_back({{"account", m.accounts[suspects.flagged_rows[i]]},
                       {"similarity", suspects.flagged_similarity[i]}});
  report["flagged"] = std::move(flagged);
  io::atomic_write_file(out / "suspects.json", report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

struct StratifiedSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline StratifiedSplit split_stratified(const std::vector<int>& y, double test_fraction,
                                        std::uint64_t seed) {
  StratifiedSplit split;
  std::mt19937_64 g(seed);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) rows.push_back(i);
    const std::vector<std::size_t> order = rng::shuffled_indices(g, rows.size());
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    for (std::size_t i = 0; i < rows.size(); ++i)
      (i < n_test ? split.test : split.train).push_back(rows[order[i]]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

inline json metrics_to_json(const Metrics& m) {
  return {{"balanced_accuracy", m.balanced_accuracy},
          {"precision", {{"malicious", m.cls[1].precision}, {"benign", m.cls[0].precision}}},
          {"recall", {{"malicious", m.cls[1].recall}, {"benign", m.cls[0].recall}}},
          {"f1", {{"malicious", m.cls[1].f1}, {"benign", m.cls[0].f1}}}};
}

inline void run_classify(const PipelineConfig& cfg, const fs::path& out) {
  fs::path source = out / "top3.csv";
  if (cfg.classify_features == "pruned") source = out / "pruned.csv";
  else if (cfg.classify_features == "pca") source = out / "pca.csv";
  else if (cfg.classify_features != "top3")
    throw Error(Errc::ConfigError, "classify_features must be top3|pruned|pca");
  const LabeledMatrix m = load_matrix(source);

  std::vector<std::size_t> labeled_rows;
  for (std::size_t r = 0; r < m.labels.size(); ++r)
    if (m.labels[r] != Label::Unknown) labeled_rows.push_back(r);
  const Matrix X = m.X.select_rows(labeled_rows);
  std::vector<int> y;
  for (std::size_t r : labeled_rows) y.push_back(m.labels[r] == Label::Malicious ? 1 : 0);

  const StratifiedSplit split =
      split_stratified(y, cfg.test_fraction, rng::derive_seed(cfg.seed, "split"));
  const Matrix X_train = X.select_rows(split.train);
  const Matrix X_test = X.select_rows(split.test);
  std::vector<int> y_train, y_test;
  for (std::size_t i : split.train) y_train.push_back(y[i]);
  for (std::size_t i : split.test) y_test.push_back(y[i]);

  TreeEnsembleModel model =
      extratrees_train(X_train, y_train, cfg.trees, rng::derive_seed(cfg.seed, "extratrees"));
  {
    std::string joined;
    for (const std::string& c : m.columns) joined += c + "\n";
    model.schema_hash = rng::fnv1a64(joined);
  }
  io::atomic_write_file(out / "model.json", ensemble_to_json(model).dump() + "\n");

  const Prediction pred = extratrees_predict(model, X_test);
  const Metrics metrics = compute_metrics(y_test, pred.labels);
  json report;
  report["features"] = cfg.classify_features;
  report["classifier"] = "extra_trees";
  report["train_rows"] = split.train.size();
  report["test_rows"] = split.test.size();
  report["metrics"] = metrics_to_json(metrics);
  io::atomic_write_file(out / "metrics.json", report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// behavior
// ---------------------------------------------------------------------------

/// Per sub-dataset: extract features, cluster with the fixed k, flag
/// suspects by cosine similarity; known-malicious members are tagged 1
/// everywhere they appear. Sub-datasets without known malicious accounts (or
/// with fewer rows than k) contribute all-zero flags for benign accounts.
inline std::vector<BehaviorVector> behavior_vectors_for(
    const std::vector<Transaction>& txs, const std::map<std::string, Label>& labels,
    Granularity granularity, const PipelineConfig& cfg) {
  const Thresholds th = thresholds_from_config(cfg);
  const StatisticCatalog catalog = cfg.statistic_catalog();
  std::map<std::string, std::map<std::size_t, int>> flags;  // account -> sd -> 0/1

  for (const SubDataset& sd : segment(txs, granularity)) {
    const LabeledMatrix m = features_for_sd(sd, labels, th, catalog);
    std::vector<bool> malicious(m.labels.size());
    std::size_t n_mal = 0;
    for (std::size_t r = 0; r < m.labels.size(); ++r) {
      malicious[r] = m.labels[r] == Label::Malicious;
      n_mal += malicious[r] ? 1 : 0;
    }
    std::set<std::size_t> flagged;
    if (n_mal > 0 && m.X.rows >= static_cast<std::size_t>(cfg.behavior_k) &&
        cfg.behavior_k >= 2) {
      const Standardization std_m = standardize(m.X);
      const ClusterModel model = kmeans_fit(
          std_m.X, cfg.behavior_k,
          rng::derive_seed(cfg.seed, std::string("behavior/") + granularity_name(granularity),
                           sd.index));
      const SuspectReport report = flag_suspects(model, std_m.X, malicious, cfg.epsilon,
                                                 activity_date_columns(m.columns));
      flagged.insert(report.flagged_rows.begin(), report.flagged_rows.end());
    }
    for (std::size_t r = 0; r < m.accounts.size(); ++r)
      flags[m.accounts[r]][sd.index] = (malicious[r] || flagged.count(r)) ? 1 : 0;
  }

  std::vector<BehaviorVector> vectors;
  vectors.reserve(flags.size());
  for (const auto& [account, per_sd] : flags)
    vectors.push_back(behavior_vector(account, granularity, per_sd));
  return vectors;
}

inline void run_behavior(const PipelineConfig& cfg, const fs::path& out) {
  const std::vector<Transaction> txs = load_transactions(cfg, out);
  const std::map<std::string, Label> labels = label_map(load_labels(cfg, out));

  json cohorts = json::object();
  for (Granularity g : cfg.granularities) {
    const std::vector<BehaviorVector> vectors = behavior_vectors_for(txs, labels, g, cfg);
    const std::map<Granularity, GranularityReport> reports =
        granularity_report(vectors, cfg.pm_threshold);
    const GranularityReport& rep = reports.at(g);
    const std::string name = granularity_name(g);

    std::ostringstream table;
    table << "account,granularity,n_i,change_count,p_m,M_as_bitstring\n";
    for (const BehaviorVector& v : vectors) {
      table << v.account << ',' << name << ',' << v.n() << ',' << change_count(v) << ','
            << io::format_double(malicious_probability(v)) << ',' << bitstring(v) << "\n";
    }
    io::atomic_write_file(out / ("behavior_" + name + ".csv"), table.str());

    std::ostringstream changes;
    changes << "change_count,accounts\n";
    for (const auto& [count, n] : rep.change_histogram) changes << count << ',' << n << "\n";
    io::atomic_write_file(out / ("behavior_changes_" + name + ".csv"), changes.str());

    std::ostringstream pm;
    pm << "p_m,accounts\n";
    for (const auto& [p, n] : rep.pm_histogram) pm << io::format_double(p) << ',' << n << "\n";
    io::atomic_write_file(out / ("behavior_pm_" + name + ".csv"), pm.str());

    cohorts[name] = {{"pm_zero", rep.pm_zero_cohort},
                     {"pm_at_least_threshold", rep.pm_positive_cohort},
                     {"pm_threshold", cfg.pm_threshold}};
  }
  io::atomic_write_file(out / "behavior_cohorts.json", cohorts.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// fitdist
// ---------------------------------------------------------------------------

inline std::vector<double> distribution_samples(const std::vector<Transaction>& txs,
                                                const std::string& which) {
  SubDataset all;
  if (txs.empty()) throw Error(Errc::EmptyDataset, "no transactions");
  all.start = txs.front().block_number;
  all.end = txs.back().block_number + 1;
  all.transactions = txs;
  const TemporalGraph g = TemporalGraph::build(all);

  std::vector<double> samples;
  if (which == "indegree" || which == "outdegree") {
    for (std::uint32_t a = 0; a < g.node_count(); ++a) {
      const std::size_t deg = which == "indegree" ? g.in_degree_agg(a) : g.out_degree_agg(a);
      if (deg > 0) samples.push_back(static_cast<double>(deg));
    }
  } else if (which == "iet") {
    for (std::uint32_t a = 0; a < g.node_count(); ++a) {
      if (g.in_events(a).size() + g.out_events(a).size() < 2) continue;
      for (double dt : iet_samples(g, a)) samples.push_back(dt);
    }
  } else {
    throw Error(Errc::ConfigError, "fitdist series must be indegree|outdegree|iet");
  }
  return samples;
}

inline void run_fitdist(const PipelineConfig& cfg, const fs::path& out, const std::string& which,
                        std::size_t min_tail = 50) {
  const std::vector<Transaction> txs = load_transactions(cfg, out);
  const std::vector<double> samples = distribution_samples(txs, which);

  const PowerLawFit fit = powerlaw_fit(samples, min_tail);
  json report = {{"series", which},
                 {"alpha", fit.alpha},
                 {"x_min", fit.x_min},
                 {"ks", fit.ks_distance},
                 {"n_tail", fit.n_tail},
                 {"n_samples", samples.size()}};
  io::atomic_write_file(out / ("fit_" + which + ".json"), report.dump(2) + "\n");

  std::ostringstream table;
  table << "x,p_geq\n";
  for (const auto& [x, p] : ccdf(samples))
    table << io::format_double(x) << ',' << io::format_double(p) << "\n";
  io::atomic_write_file(out / ("ccdf_" + which + ".csv"), table.str());
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Collects whatever stage outputs exist in `out` into one summary document.
inline void run_report(const PipelineConfig& cfg, const fs::path& out) {
  json report = json::object();
  report["config"] = json::object();
  report["config"]["seed"] = cfg.seed;
  auto attach = [&](const char* key, const fs::path& path) {
    if (fs::exists(path)) report[key] = json::parse(io::read_file(path));
  };
  attach("manifest", out / "manifest.json");
  attach("selection", out / "selection.json");
  attach("suspects", out / "suspects.json");
  attach("metrics", out / "metrics.json");
  attach("behavior_cohorts", out / "behavior_cohorts.json");
  for (const char* series : {"indegree", "outdegree", "iet"})
    attach((std::string("fit_") + series).c_str(), out / ("fit_" + std::string(series) + ".json"));
  io::atomic_write_file(out / "report.json", report.dump(2) + "\n");
}

}  // namespace blockwatch::pipeline
