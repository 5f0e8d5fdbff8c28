#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blockwatch/error.hpp"
#include "blockwatch/matrix.hpp"

namespace blockwatch {

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct Standardization {
  Matrix X;
  std::vector<double> mean;
  std::vector<double> stddev;  // 0 for zero-variance columns, which map to zeros
};

inline Standardization standardize(const Matrix& X) {
  Standardization s;
  s.X = Matrix(X.rows, X.cols);
  s.mean.assign(X.cols, 0.0);
  s.stddev.assign(X.cols, 0.0);
  if (X.rows == 0) return s;
  for (std::size_t c = 0; c < X.cols; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) sum += X.at(r, c);
    const double mean = sum / static_cast<double>(X.rows);
    double ss = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) {
      const double d = X.at(r, c) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(X.rows));
    s.mean[c] = mean;
    s.stddev[c] = sd;
    if (sd > 0.0)
      for (std::size_t r = 0; r < X.rows; ++r) s.X.at(r, c) = (X.at(r, c) - mean) / sd;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Gini scoring: decision-stump impurity decrease of the best single-threshold
// split per column. Needs no model training and stays in [0, 0.5] for binary
// labels.
// ---------------------------------------------------------------------------

namespace detail {

inline double gini_impurity(double n0, double n1) {
  const double n = n0 + n1;
  if (n <= 0.0) return 0.0;
  const double p0 = n0 / n, p1 = n1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace detail

inline double gini_stump_score(const std::vector<double>& column, const std::vector<int>& labels) {
  const std::size_t n = column.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&column](std::size_t a, std::size_t b) { return column[a] < column[b]; });

  double total1 = 0.0;
  for (int y : labels) total1 += y;
  const double total0 = static_cast<double>(n) - total1;
  const double parent = detail::gini_impurity(total0, total1);

  double best = 0.0;
  double left0 = 0.0, left1 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t idx = order[i];
    if (labels[idx] == 1) left1 += 1.0;
    else left0 += 1.0;
    if (column[order[i]] == column[order[i + 1]]) continue;  // no threshold between equal values
    const double nl = left0 + left1;
    const double nr = static_cast<double>(n) - nl;
    const double child = (nl / static_cast<double>(n)) * detail::gini_impurity(left0, left1) +
                         (nr / static_cast<double>(n)) *
                             detail::gini_impurity(total0 - left0, total1 - left1);
    best = std::max(best, parent - child);
  }
  return best;
}

inline std::vector<double> gini_scores(const Matrix& X, const std::vector<int>& labels) {
  if (X.rows != labels.size())
    throw Error(Errc::LengthMismatch, "matrix rows != label count");
  bool has0 = false, has1 = false;
  for (int y : labels) (y == 1 ? has1 : has0) = true;
  if (!has0 || !has1) throw Error(Errc::SingleClassInput, "gini scoring needs both classes");
  std::vector<double> scores(X.cols, 0.0);
  for (std::size_t c = 0; c < X.cols; ++c) scores[c] = gini_stump_score(X.column(c), labels);
  return scores;
}

struct GiniRanking {
  std::vector<double> scores;       // per column
  std::vector<std::size_t> order;   // columns sorted by score desc, index asc on ties
};

inline GiniRanking gini_rank(const Matrix& X, const std::vector<int>& labels) {
  GiniRanking r;
  r.scores = gini_scores(X, labels);
  r.order.resize(X.cols);
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&r](std::size_t a, std::size_t b) {
    return r.scores[a] > r.scores[b];
  });
  return r;
}

/// Top-k columns per source attribute, returned in ascending column order.
/// Attributes with <= k columns keep everything (scalar features are their
/// own attribute and always survive this stage).
inline std::vector<std::size_t> top_k_per_attribute(const std::vector<std::string>& column_attrs,
                                                    const std::vector<double>& scores,
                                                    std::size_t k = 3) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < column_attrs.size(); ++c) groups[column_attrs[c]].push_back(c);
  std::vector<std::size_t> keep;
  for (auto& [attr, cols] : groups) {
    std::stable_sort(cols.begin(), cols.end(), [&scores](std::size_t a, std::size_t b) {
      return scores[a] > scores[b];
    });
    for (std::size_t i = 0; i < cols.size() && i < k; ++i) keep.push_back(cols[i]);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

// ---------------------------------------------------------------------------
// Pearson correlation pruning
// ---------------------------------------------------------------------------

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n == 0 || n != b.size()) throw Error(Errc::LengthMismatch, "pearson needs equal lengths");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;  // r against a constant column is defined as 0
  return sab / std::sqrt(saa * sbb);
}

struct CorrelationDrop {
  std::size_t dropped;
  std::size_t against;
  double r;
};

struct CorrelationPruneResult {
  std::vector<std::size_t> retained;
  std::vector<CorrelationDrop> drops;
};

/// Greedy scan in column order: a column is dropped when |r| >= threshold
/// against any already-retained column.
inline CorrelationPruneResult correlation_prune(const Matrix& X, double threshold) {
  CorrelationPruneResult result;
  std::vector<std::vector<double>> retained_cols;
  for (std::size_t c = 0; c < X.cols; ++c) {
    std::vector<double> col = X.column(c);
    bool drop = false;
    for (std::size_t k = 0; k < result.retained.size(); ++k) {
      const double r = pearson(col, retained_cols[k]);
      if (std::abs(r) >= threshold) {
        result.drops.push_back({c, result.retained[k], r});
        drop = true;
        break;
      }
    }
    if (!drop) {
      result.retained.push_back(c);
      retained_cols.push_back(std::move(col));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

struct PcaResult {
  Matrix components;                   // n_components x cols, orthonormal rows
  Matrix transformed;                  // rows x n_components
  std::vector<double> explained_ratio;  // per kept component
  std::vector<double> all_ratios;       // every eigenvalue's share
  std::vector<double> mean;             // column means removed before projection
  std::size_t n_components = 0;
};

/// Keeps the smallest component count whose cumulative explained-variance
/// ratio exceeds `variance_target`. Sign convention: the largest-magnitude
/// loading of each component is positive.
inline PcaResult pca_reduce(const Matrix& X, double variance_target = 0.982) {
  if (X.rows < 2) throw Error(Errc::DegenerateMatrix, "PCA needs at least 2 rows");
  const auto n = static_cast<Eigen::Index>(X.rows);
  const auto d = static_cast<Eigen::Index>(X.cols);

  Eigen::MatrixXd M(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) M(r, c) = X.at(r, c);

  PcaResult out;
  const Eigen::RowVectorXd mean = M.colwise().mean();
  M.rowwise() -= mean;
  out.mean.assign(mean.data(), mean.data() + d);

  const Eigen::MatrixXd cov = (M.transpose() * M) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::DegenerateMatrix, "eigendecomposition failed");

  // Ascending eigenvalues from Eigen; walk them in descending order.
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) total += std::max(0.0, evals(i));

  out.all_ratios.resize(d, 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double ev = std::max(0.0, evals(d - 1 - i));
    out.all_ratios[i] = total > 0.0 ? ev / total : 0.0;
  }

  std::size_t k = 0;
  double cum = 0.0;
  while (k < static_cast<std::size_t>(d)) {
    cum += out.all_ratios[k];
    ++k;
    if (cum > variance_target) break;
  }
  out.n_components = k;
  out.explained_ratio.assign(out.all_ratios.begin(), out.all_ratios.begin() + k);

  Eigen::MatrixXd W(k, d);
  for (std::size_t i = 0; i < k; ++i) {
    Eigen::VectorXd v = evecs.col(d - 1 - static_cast<Eigen::Index>(i));
    Eigen::Index argmax = 0;
    v.cwiseAbs().maxCoeff(&argmax);
    if (v(argmax) < 0.0) v = -v;
    W.row(i) = v.transpose();
  }

  const Eigen::MatrixXd T = M * W.transpose();
  out.components = Matrix(k, X.cols);
  for (std::size_t i = 0; i < k; ++i)
    for (Eigen::Index c = 0; c < d; ++c) out.components.at(i, c) = W(i, c);
  out.transformed = Matrix(X.rows, k);
  for (Eigen::Index r = 0; r < n; ++r)
    for (std::size_t i = 0; i < k; ++i) out.transformed.at(r, i) = T(r, i);
  return out;
}

/// Inverse projection: rows of `T` mapped back to the original feature space.
inline Matrix pca_reconstruct(const PcaResult& pca, const Matrix& T) {
  Matrix out(T.rows, pca.components.cols);
  for (std::size_t r = 0; r < T.rows; ++r) {
    for (std::size_t c = 0; c < pca.components.cols; ++c) {
      double v = pca.mean[c];
      for (std::size_t i = 0; i < pca.n_components; ++i)
        v += T.at(r, i) * pca.components.at(i, c);
      out.at(r, c) = v;
    }
  }
  return out;
}

}  // namespace blockwatch
