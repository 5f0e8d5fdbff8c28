#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "blockwatch/error.hpp"
#include "blockwatch/matrix.hpp"
#include "blockwatch/rng.hpp"

namespace blockwatch {

enum class Criterion { Gini, Entropy };

inline const char* criterion_name(Criterion c) {
  return c == Criterion::Gini ? "gini" : "entropy";
}

inline Criterion parse_criterion(const std::string& s) {
  if (s == "gini") return Criterion::Gini;
  if (s == "entropy") return Criterion::Entropy;
  throw Error(Errc::BadHyperparameter, "unknown criterion '" + s + "'");
}

struct ExtraTreesParams {
  int n_estimators = 200;
  Criterion criterion = Criterion::Entropy;
  double max_features = 0.3;  // fraction of columns drawn per node
  double max_samples = 0.3;   // fraction of rows drawn per tree
  bool bootstrap = false;     // with replacement iff set
  int min_samples_leaf = 14;
  int min_samples_split = 20;
  bool class_weight_balanced = true;

  /// The winning configuration for the full dataset with every account type.
  static ExtraTreesParams best_full_dataset() { return {}; }

  void validate() const {
    if (n_estimators < 1) throw Error(Errc::BadHyperparameter, "n_estimators must be >= 1");
    if (!(max_features > 0.0 && max_features <= 1.0))
      throw Error(Errc::BadHyperparameter, "max_features must be in (0, 1]");
    if (!(max_samples > 0.0 && max_samples <= 1.0))
      throw Error(Errc::BadHyperparameter, "max_samples must be in (0, 1]");
    if (min_samples_leaf < 1) throw Error(Errc::BadHyperparameter, "min_samples_leaf must be >= 1");
    if (min_samples_split < 2)
      throw Error(Errc::BadHyperparameter, "min_samples_split must be >= 2");
  }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<double, 2> class_weight = {0.0, 0.0};  // weighted sample mass per class

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
};

struct TreeEnsembleModel {
  ExtraTreesParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::array<double, 2> class_weights = {1.0, 1.0};
  std::vector<Tree> trees;
  std::uint64_t schema_hash = 0;  // hash of training column names, 0 if unset
};

namespace detail {

inline double impurity(double w0, double w1, Criterion criterion) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w, p1 = w1 / w;
  if (criterion == Criterion::Gini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

struct TreeBuilder {
  const Matrix& X;
  const std::vector<int>& y;
  const ExtraTreesParams& params;
  const std::array<double, 2>& weights;
  std::mt19937_64 rng;
  Tree tree;
  std::size_t n_candidates;

  TreeBuilder(const Matrix& x, const std::vector<int>& labels, const ExtraTreesParams& p,
              const std::array<double, 2>& w, std::uint64_t seed)
      : X(x), y(labels), params(p), weights(w), rng(seed) {
    n_candidates = std::max<std::size_t>(
        1, static_cast<std::size_t>(params.max_features * static_cast<double>(X.cols)));
  }

  int build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    double w0 = 0.0, w1 = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (y[idx[i]] == 1) {
        w1 += weights[1];
        ++n1;
      } else {
        w0 += weights[0];
      }
    }

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_id].class_weight = {w0, w1};

    const bool pure = n1 == 0 || n1 == n;
    if (pure || n < static_cast<std::size_t>(params.min_samples_split)) return node_id;

    const double parent_impurity = impurity(w0, w1, params.criterion);

    // Draw the candidate columns, then one uniform threshold per non-constant
    // candidate; keep the (column, threshold) with the best weighted
    // impurity decrease.
    const std::vector<std::size_t> candidates =
        rng::sample_without_replacement(rng, X.cols, n_candidates);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_decrease = -1.0;
    for (std::size_t c : candidates) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t i = begin; i < end; ++i) {
        const double v = X.at(idx[i], c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) continue;
      const double t = lo + rng::uniform01(rng) * (hi - lo);
      double lw0 = 0.0, lw1 = 0.0;
      std::size_t ln = 0;
      for (std::size_t i = begin; i < end; ++i) {
        if (X.at(idx[i], c) <= t) {
          ++ln;
          if (y[idx[i]] == 1) lw1 += weights[1];
          else lw0 += weights[0];
        }
      }
      const std::size_t rn = n - ln;
      if (ln < static_cast<std::size_t>(params.min_samples_leaf) ||
          rn < static_cast<std::size_t>(params.min_samples_leaf))
        continue;
      const double rw0 = w0 - lw0, rw1 = w1 - lw1;
      const double wl = lw0 + lw1, wr = rw0 + rw1;
      const double child = (wl * impurity(lw0, lw1, params.criterion) +
                            wr * impurity(rw0, rw1, params.criterion)) /
                           (w0 + w1);
      const double decrease = parent_impurity - child;
      if (decrease > best_decrease) {
        best_decrease = decrease;
        best_feature = static_cast<int>(c);
        best_threshold = t;
      }
    }
    if (best_feature < 0) return node_id;  // no valid split among candidates

    const auto mid_it =
        std::stable_partition(idx.begin() + begin, idx.begin() + end, [&](std::size_t i) {
          return X.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold;
        });
    const auto mid = static_cast<std::size_t>(mid_it - idx.begin());

    tree.nodes[node_id].feature = best_feature;
    tree.nodes[node_id].threshold = best_threshold;
    const int left = build(idx, begin, mid);
    tree.nodes[node_id].left = left;
    const int right = build(idx, mid, end);
    tree.nodes[node_id].right = right;
    return node_id;
  }
};

inline const TreeNode& descend(const Tree& tree, const double* row) {
  const TreeNode* node = &tree.nodes[0];
  while (!node->is_leaf())
    node = row[node->feature] <= node->threshold ? &tree.nodes[node->left]
                                                 : &tree.nodes[node->right];
  return *node;
}

}  // namespace detail

/// Extremely randomized trees: per tree a row sample, per node a random
/// column subset with one uniformly drawn threshold each, best impurity
/// decrease wins. Per-tree seeds derive from (seed, tree index), so parallel
/// and serial training are bit-identical.
inline TreeEnsembleModel extratrees_train(const Matrix& X, const std::vector<int>& y,
                                          const ExtraTreesParams& params, std::uint64_t seed,
                                          unsigned n_threads = std::thread::hardware_concurrency()) {
  params.validate();
  if (X.rows != y.size()) throw Error(Errc::LengthMismatch, "rows != labels");
  if (X.rows == 0 || X.cols == 0) throw Error(Errc::TooFewRows, "empty training matrix");
  std::size_t n1 = 0;
  for (int v : y) n1 += v == 1 ? 1 : 0;
  const std::size_t n0 = y.size() - n1;
  if (n0 == 0 || n1 == 0) throw Error(Errc::SingleClassInput, "training labels are one class");

  TreeEnsembleModel model;
  model.params = params;
  model.seed = seed;
  model.n_features = X.cols;
  if (params.class_weight_balanced) {
    const double n = static_cast<double>(y.size());
    model.class_weights = {n / (2.0 * static_cast<double>(n0)),
                           n / (2.0 * static_cast<double>(n1))};
  }
  model.trees.resize(params.n_estimators);

  const std::size_t m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.max_samples * static_cast<double>(X.rows))));

  auto build_tree = [&](int t) {
    std::mt19937_64 g(rng::derive_seed(seed, "tree", static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> idx;
    if (params.bootstrap) {
      idx.resize(m);
      for (std::size_t i = 0; i < m; ++i) idx[i] = rng::below(g, X.rows);
    } else {
      idx = rng::sample_without_replacement(g, X.rows, m);
    }
    detail::TreeBuilder builder(X, y, params, model.class_weights, g());
    builder.build(idx, 0, idx.size());
    model.trees[t] = std::move(builder.tree);
  };

  const int T = params.n_estimators;
  const unsigned workers = std::max(1u, std::min<unsigned>(n_threads, 16));
  if (workers <= 1 || T < 4) {
    for (int t = 0; t < T; ++t) build_tree(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int t = static_cast<int>(w); t < T; t += static_cast<int>(workers)) build_tree(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  return model;
}

struct Prediction {
  std::vector<int> labels;
  Matrix scores;  // rows x 2, per-class mean leaf distribution
};

inline Prediction extratrees_predict(const TreeEnsembleModel& model, const Matrix& X) {
  if (X.cols != model.n_features)
    throw Error(Errc::SchemaMismatch, "feature count " + std::to_string(X.cols) +
                                          " != model's " + std::to_string(model.n_features));
  Prediction pred;
  pred.labels.assign(X.rows, 0);
  pred.scores = Matrix(X.rows, 2);
  const double inv_trees = 1.0 / static_cast<double>(model.trees.size());
  for (std::size_t r = 0; r < X.rows; ++r) {
    double s0 = 0.0, s1 = 0.0;
    for (const Tree& tree : model.trees) {
      const TreeNode& leaf = detail::descend(tree, X.row(r));
      const double w = leaf.class_weight[0] + leaf.class_weight[1];
      if (w > 0.0) {
        s0 += leaf.class_weight[0] / w;
        s1 += leaf.class_weight[1] / w;
      }
    }
    pred.scores.at(r, 0) = s0 * inv_trees;
    pred.scores.at(r, 1) = s1 * inv_trees;
    pred.labels[r] = s1 > s0 ? 1 : 0;
  }
  return pred;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline nlohmann::json ensemble_to_json(const TreeEnsembleModel& model) {
  nlohmann::json j;
  j["model"] = "extra_trees";
  j["seed"] = model.seed;
  j["n_features"] = model.n_features;
  j["schema_hash"] = model.schema_hash;
  j["class_weights"] = {model.class_weights[0], model.class_weights[1]};
  j["params"] = {{"n_estimators", model.params.n_estimators},
                 {"criterion", criterion_name(model.params.criterion)},
                 {"max_features", model.params.max_features},
                 {"max_samples", model.params.max_samples},
                 {"bootstrap", model.params.bootstrap},
                 {"min_samples_leaf", model.params.min_samples_leaf},
                 {"min_samples_split", model.params.min_samples_split},
                 {"class_weight_balanced", model.params.class_weight_balanced}};
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.class_weight[0],
                       n.class_weight[1]});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

inline TreeEnsembleModel ensemble_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("model", "") != "extra_trees")
    throw Error(Errc::SchemaMismatch, "not an extra_trees model file");
  TreeEnsembleModel model;
  model.seed = j.at("seed").get<std::uint64_t>();
  model.n_features = j.at("n_features").get<std::size_t>();
  model.schema_hash = j.value("schema_hash", 0ULL);
  model.class_weights = {j.at("class_weights")[0].get<double>(),
                         j.at("class_weights")[1].get<double>()};
  const auto& p = j.at("params");
  model.params.n_estimators = p.at("n_estimators").get<int>();
  model.params.criterion = parse_criterion(p.at("criterion").get<std::string>());
  model.params.max_features = p.at("max_features").get<double>();
  model.params.max_samples = p.at("max_samples").get<double>();
  model.params.bootstrap = p.at("bootstrap").get<bool>();
  model.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
  model.params.min_samples_split = p.at("min_samples_split").get<int>();
  model.params.class_weight_balanced = p.at("class_weight_balanced").get<bool>();
  for (const auto& nodes : j.at("trees")) {
    Tree tree;
    for (const auto& n : nodes) {
      TreeNode node;
      node.feature = n[0].get<int>();
      node.threshold = n[1].get<double>();
      node.left = n[2].get<int>();
      node.right = n[3].get<int>();
      node.class_weight = {n[4].get<double>(), n[5].get<double>()};
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace blockwatch
