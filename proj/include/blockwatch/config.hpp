#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/extratrees.hpp"
#include "blockwatch/io.hpp"
#include "blockwatch/timeseries.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

/// Flat, typed, human-editable key=value configuration. Every threshold the
/// pipeline uses lives here so a run is auditable from one document;
/// `print-config` emits the resolved values and the same text parses back
/// losslessly.
struct PipelineConfig {
  // inputs
  std::string transactions;
  std::string labels;
  std::string format = "csv";  // csv | jsonl

  // segmentation
  std::vector<Granularity> granularities = {Granularity::All};

  // feature thresholds
  double theta_t = 2.0;
  double burst_factor = 0.8;
  std::int64_t theta_a = 0;  // 0 = sub-dataset duration

  // statistic catalog
  std::vector<Stat> catalog = StatisticCatalog::default_catalog().stats;

  // selection
  int gini_top_k = 3;
  double correlation_threshold = 0.9;
  double pca_variance_target = 0.982;

  // clustering
  int kmeans_k_min = 3;
  int kmeans_k_max = 24;
  int kmeans_seeds_per_k = 3;
  double epsilon = 1e-7;

  // behavior
  int behavior_k = 9;
  double pm_threshold = 0.5;

  // classification
  ExtraTreesParams trees;
  double test_fraction = 0.2;
  std::string classify_features = "top3";  // top3 | pruned | pca

  // sampling
  std::uint64_t seed = 42;
  std::uint64_t undersample_target = 0;  // 0 = disabled

  StatisticCatalog statistic_catalog() const { return {catalog}; }

  std::string serialize() const {
    std::ostringstream out;
    out << "# blockwatch pipeline configuration\n";
    out << "transactions = " << transactions << "\n";
    out << "labels = " << labels << "\n";
    out << "format = " << format << "\n";
    out << "granularities = " << join_granularities() << "\n";
    out << "theta_t = " << io::format_double(theta_t) << "\n";
    out << "burst_factor = " << io::format_double(burst_factor) << "\n";
    out << "theta_a = " << theta_a << "\n";
    out << "catalog = " << join_catalog() << "\n";
    out << "gini_top_k = " << gini_top_k << "\n";
    out << "correlation_threshold = " << io::format_double(correlation_threshold) << "\n";
    out << "pca_variance_target = " << io::format_double(pca_variance_target) << "\n";
    out << "kmeans_k_min = " << kmeans_k_min << "\n";
    out << "kmeans_k_max = " << kmeans_k_max << "\n";
    out << "kmeans_seeds_per_k = " << kmeans_seeds_per_k << "\n";
    out << "epsilon = " << io::format_double(epsilon) << "\n";
    out << "behavior_k = " << behavior_k << "\n";
    out << "pm_threshold = " << io::format_double(pm_threshold) << "\n";
    out << "trees_n_estimators = " << trees.n_estimators << "\n";
    out << "trees_criterion = " << criterion_name(trees.criterion) << "\n";
    out << "trees_max_features = " << io::format_double(trees.max_features) << "\n";
    out << "trees_max_samples = " << io::format_double(trees.max_samples) << "\n";
    out << "trees_bootstrap = " << (trees.bootstrap ? "true" : "false") << "\n";
    out << "trees_min_samples_leaf = " << trees.min_samples_leaf << "\n";
    out << "trees_min_samples_split = " << trees.min_samples_split << "\n";
    out << "trees_class_weight_balanced = " << (trees.class_weight_balanced ? "true" : "false")
        << "\n";
    out << "test_fraction = " << io::format_double(test_fraction) << "\n";
    out << "classify_features = " << classify_features << "\n";
    out << "seed = " << seed << "\n";
    out << "undersample_target = " << undersample_target << "\n";
    return out.str();
  }

  static PipelineConfig parse(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      cfg.set(key, value, line_no);
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value, std::size_t line_no = 0) {
    try {
      if (key == "transactions") transactions = value;
      else if (key == "labels") labels = value;
      else if (key == "format") format = value;
      else if (key == "granularities") {
        granularities.clear();
        for (const std::string& g : split(value)) granularities.push_back(parse_granularity(g));
      } else if (key == "theta_t") theta_t = std::stod(value);
      else if (key == "burst_factor") burst_factor = std::stod(value);
      else if (key == "theta_a") theta_a = std::stoll(value);
      else if (key == "catalog") {
        catalog.clear();
        for (const std::string& s : split(value)) catalog.push_back(parse_stat(s));
      } else if (key == "gini_top_k") gini_top_k = std::stoi(value);
      else if (key == "correlation_threshold") correlation_threshold = std::stod(value);
      else if (key == "pca_variance_target") pca_variance_target = std::stod(value);
      else if (key == "kmeans_k_min") kmeans_k_min = std::stoi(value);
      else if (key == "kmeans_k_max") kmeans_k_max = std::stoi(value);
      else if (key == "kmeans_seeds_per_k") kmeans_seeds_per_k = std::stoi(value);
      else if (key == "epsilon") epsilon = std::stod(value);
      else if (key == "behavior_k") behavior_k = std::stoi(value);
      else if (key == "pm_threshold") pm_threshold = std::stod(value);
      else if (key == "trees_n_estimators") trees.n_estimators = std::stoi(value);
      else if (key == "trees_criterion") trees.criterion = parse_criterion(value);
      else if (key == "trees_max_features") trees.max_features = std::stod(value);
      else if (key == "trees_max_samples") trees.max_samples = std::stod(value);
      else if (key == "trees_bootstrap") trees.bootstrap = parse_bool(value);
      else if (key == "trees_min_samples_leaf") trees.min_samples_leaf = std::stoi(value);
      else if (key == "trees_min_samples_split") trees.min_samples_split = std::stoi(value);
      else if (key == "trees_class_weight_balanced")
        trees.class_weight_balanced = parse_bool(value);
      else if (key == "test_fraction") test_fraction = std::stod(value);
      else if (key == "classify_features") classify_features = value;
      else if (key == "seed") seed = std::stoull(value);
      else if (key == "undersample_target") undersample_target = std::stoull(value);
      else
        throw Error(Errc::ConfigError,
                    "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": bad value for '" +
                                         key + "': \"" + value + "\"");
    }
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  static bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw Error(Errc::ConfigError, "expected true/false, got '" + s + "'");
  }

  std::string join_granularities() const {
    std::string out;
    for (std::size_t i = 0; i < granularities.size(); ++i) {
      if (i) out += ",";
      out += granularity_name(granularities[i]);
    }
    return out;
  }

  std::string join_catalog() const {
    std::string out;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (i) out += ",";
      out += stat_name(catalog[i]);
    }
    return out;
  }
};

}  // namespace blockwatch
