#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/kmeans.hpp"
#include "blockwatch/matrix.hpp"

namespace blockwatch {

inline double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw Error(Errc::LengthMismatch, "vector sizes differ");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::ZeroVector, "cosine similarity of a zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

struct SuspectReport {
  int cluster = 0;
  std::size_t malicious_members = 0;
  std::vector<std::size_t> flagged_rows;
  std::vector<double> flagged_similarity;  // max similarity to a malicious member, per flag
};

/// Flags non-malicious members of the cluster holding the most known
/// malicious rows whose behavior is within 1 - epsilon (cosine) of some
/// malicious member of that cluster. `exclude_cols` removes activity-date
/// style columns from the comparison; rows that are all-zero on the
/// remaining columns are skipped (cosine undefined).
inline SuspectReport flag_suspects(const ClusterModel& model, const Matrix& X,
                                   const std::vector<bool>& is_malicious, double epsilon = 1e-7,
                                   const std::vector<std::size_t>& exclude_cols = {}) {
  if (X.rows != is_malicious.size())
    throw Error(Errc::LengthMismatch, "label size != matrix rows");
  if (model.assignments.size() != X.rows)
    throw Error(Errc::LengthMismatch, "assignment size != matrix rows");

  std::vector<std::size_t> malicious_per_cluster(model.k, 0);
  bool any = false;
  for (std::size_t i = 0; i < X.rows; ++i) {
    if (is_malicious[i]) {
      ++malicious_per_cluster[model.assignments[i]];
      any = true;
    }
  }
  if (!any) throw Error(Errc::NoMaliciousLabels, "no known malicious rows");

  SuspectReport report;
  for (int c = 1; c < model.k; ++c)
    if (malicious_per_cluster[c] > malicious_per_cluster[report.cluster]) report.cluster = c;
  report.malicious_members = malicious_per_cluster[report.cluster];

  std::vector<bool> keep_col(X.cols, true);
  for (std::size_t c : exclude_cols)
    if (c < X.cols) keep_col[c] = false;
  auto restricted = [&](std::size_t row) {
    std::vector<double> v;
    v.reserve(X.cols);
    for (std::size_t c = 0; c < X.cols; ++c)
      if (keep_col[c]) v.push_back(X.at(row, c));
    return v;
  };
  auto nonzero = [](const std::vector<double>& v) {
    for (double x : v)
      if (x != 0.0) return true;
    return false;
  };

  std::vector<std::size_t> malicious_rows;
  std::vector<std::vector<double>> malicious_vecs;
  for (std::size_t i = 0; i < X.rows; ++i) {
    if (model.assignments[i] == report.cluster && is_malicious[i]) {
      std::vector<double> v = restricted(i);
      if (nonzero(v)) {
        malicious_rows.push_back(i);
        malicious_vecs.push_back(std::move(v));
      }
    }
  }

  const double cutoff = 1.0 - epsilon;
  for (std::size_t i = 0; i < X.rows; ++i) {
    if (model.assignments[i] != report.cluster || is_malicious[i]) continue;
    const std::vector<double> v = restricted(i);
    if (!nonzero(v)) continue;
    double best = -2.0;
    for (const auto& m : malicious_vecs) best = std::max(best, cosine_similarity(v, m));
    if (best >= cutoff) {
      report.flagged_rows.push_back(i);
      report.flagged_similarity.push_back(best);
    }
  }
  return report;
}

}  // namespace blockwatch
