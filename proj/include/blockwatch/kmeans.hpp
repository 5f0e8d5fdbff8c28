#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/matrix.hpp"
#include "blockwatch/rng.hpp"

namespace blockwatch {

namespace detail {

inline double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

struct ClusterModel {
  int k = 0;
  Matrix centroids;              // k x d
  std::vector<int> assignments;  // per training row
  double inertia = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<double> inertia_trace;  // after each Lloyd iteration; nonincreasing

  int assign(const double* x) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = detail::sq_dist(x, centroids.row(c), centroids.cols);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  }
};

/// Lloyd iterations from a k-means++ start. Deterministic per seed: fixed
/// summation order, ties broken toward the lower centroid index, empty
/// clusters re-seeded to the point farthest from its assigned centroid.
inline ClusterModel kmeans_fit(const Matrix& X, int k, std::uint64_t seed, int max_iter = 300,
                               double tol = 1e-6) {
  const std::size_t n = X.rows, d = X.cols;
  if (k < 1) throw Error(Errc::BadHyperparameter, "k must be >= 1");
  if (n < static_cast<std::size_t>(k))
    throw Error(Errc::TooFewRows, std::to_string(n) + " rows < k = " + std::to_string(k));

  ClusterModel model;
  model.k = k;
  model.seed = seed;
  model.centroids = Matrix(k, d);
  std::mt19937_64 g(seed);

  // k-means++ seeding
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
  {
    const std::size_t first = rng::below(g, n);
    std::copy(X.row(first), X.row(first) + d, model.centroids.row(0));
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dist = detail::sq_dist(X.row(i), model.centroids.row(c - 1), d);
        min_sq[i] = std::min(min_sq[i], dist);
        total += min_sq[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        const double target = rng::uniform01(g) * total;
        double cum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cum += min_sq[i];
          if (cum >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng::below(g, n);  // all points coincide with a centroid
      }
      std::copy(X.row(pick), X.row(pick) + d, model.centroids.row(c));
    }
  }

  model.assignments.assign(n, 0);
  std::vector<double> sums(static_cast<std::size_t>(k) * d);
  std::vector<std::size_t> counts(k);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assign
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = detail::sq_dist(X.row(i), model.centroids.row(c), d);
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      model.assignments[i] = best;
      inertia += best_d;
    }

    // Repair empty clusters: move their centroid onto the point currently
    // farthest from its own centroid, keeping k fixed.
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[model.assignments[i]];
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[model.assignments[i]] <= 1) continue;
        const double dist =
            detail::sq_dist(X.row(i), model.centroids.row(model.assignments[i]), d);
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      --counts[model.assignments[far]];
      model.assignments[far] = c;
      counts[c] = 1;
      std::copy(X.row(far), X.row(far) + d, model.centroids.row(c));
    }

    // Recompute inertia against possibly repaired centroids.
    inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      inertia += detail::sq_dist(X.row(i), model.centroids.row(model.assignments[i]), d);
    model.inertia = inertia;
    model.inertia_trace.push_back(inertia);
    model.iterations = iter + 1;

    // Update
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* s = sums.data() + static_cast<std::size_t>(model.assignments[i]) * d;
      const double* x = X.row(i);
      for (std::size_t j = 0; j < d; ++j) s[j] += x[j];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double* ctr = model.centroids.row(c);
      const double* s = sums.data() + static_cast<std::size_t>(c) * d;
      double delta = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double nv = s[j] / static_cast<double>(counts[c]);
        const double diff = nv - ctr[j];
        delta += diff * diff;
        ctr[j] = nv;
      }
      shift = std::max(shift, std::sqrt(delta));
    }
    if (shift < tol) break;
  }

  // Final assignment against the converged centroids.
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double dist = detail::sq_dist(X.row(i), model.centroids.row(c), d);
      if (dist < best_d) {
        best_d = dist;
        best = c;
      }
    }
    model.assignments[i] = best;
    inertia += best_d;
  }
  model.inertia = inertia;
  return model;
}

/// Mean silhouette over all points, Euclidean distances. Points in singleton
/// clusters score 0; coincident-point clusters (a = b = 0) score 0.
inline double silhouette(const Matrix& X, const std::vector<int>& assignments) {
  const std::size_t n = X.rows;
  if (assignments.size() != n) throw Error(Errc::LengthMismatch, "assignment size != rows");
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  std::vector<std::size_t> sizes(k, 0);
  for (int a : assignments) ++sizes[a];
  int nonempty = 0;
  for (std::size_t s : sizes) nonempty += s > 0 ? 1 : 0;
  if (nonempty < 2) throw Error(Errc::SingleCluster, "silhouette needs >= 2 clusters");

  const std::size_t d = X.cols;
  std::vector<double> scores(n, 0.0);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> cluster_sum(k);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        cluster_sum[assignments[j]] += std::sqrt(detail::sq_dist(X.row(i), X.row(j), d));
      }
      const int own = assignments[i];
      if (sizes[own] <= 1) {
        scores[i] = 0.0;
        continue;
      }
      const double a = cluster_sum[own] / static_cast<double>(sizes[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (c == own || sizes[c] == 0) continue;
        b = std::min(b, cluster_sum[c] / static_cast<double>(sizes[c]));
      }
      const double m = std::max(a, b);
      scores[i] = m > 0.0 ? (b - a) / m : 0.0;
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned t = n >= 2048 ? std::min(hw, 16u) : 1;
  if (t <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
      const std::size_t b = std::min<std::size_t>(n, i * chunk);
      const std::size_t e = std::min<std::size_t>(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(n);
}

struct SweepRow {
  int k = 0;
  std::uint64_t seed = 0;
  double silhouette = 0.0;
  double inertia = 0.0;
};

struct SweepResult {
  int best_k = 0;
  double best_score = 0.0;
  std::uint64_t best_seed = 0;
  std::vector<SweepRow> rows;
};

/// Silhouette sweep over k in [k_lo, k_hi]; the winner is the (k, seed) pair
/// with the best score, ties toward smaller k then earlier seed.
inline SweepResult sweep_k(const Matrix& X, int k_lo, int k_hi,
                           const std::vector<std::uint64_t>& seeds, int max_iter = 300,
                           double tol = 1e-6) {
  if (k_lo < 2 || k_hi < k_lo) throw Error(Errc::BadHyperparameter, "need 2 <= k_lo <= k_hi");
  if (seeds.empty()) throw Error(Errc::BadHyperparameter, "need at least one seed");
  SweepResult result;
  result.best_score = -std::numeric_limits<double>::infinity();
  for (int k = k_lo; k <= k_hi; ++k) {
    if (static_cast<std::size_t>(k) > X.rows) break;
    for (std::uint64_t seed : seeds) {
      const ClusterModel model = kmeans_fit(X, k, seed, max_iter, tol);
      const double score = silhouette(X, model.assignments);
      result.rows.push_back({k, seed, score, model.inertia});
      if (score > result.best_score) {
        result.best_score = score;
        result.best_k = k;
        result.best_seed = seed;
      }
    }
  }
  if (result.rows.empty()) throw Error(Errc::TooFewRows, "no feasible k in range");
  return result;
}

}  // namespace blockwatch
