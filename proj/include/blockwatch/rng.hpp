#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace blockwatch::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// All randomness flows from one root seed; per-module (or per-task) seeds
/// are derived by stable hashing so runs are reproducible regardless of
/// execution order.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
  return splitmix64(root ^ fnv1a64(name));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index) {
  return splitmix64(derive_seed(root, name) + 0x632be59bd9b4e019ULL * (index + 1));
}

/// Uniform double in [0, 1) with 53 random bits. Used instead of
/// std::uniform_real_distribution so streams are identical across standard
/// library implementations.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + uniform01(g) * (hi - lo);
}

/// Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
  return n == 0 ? 0 : g() % n;
}

/// Standard normal via Box-Muller on the stable uniform stream.
inline double normal(std::mt19937_64& g) {
  double u1 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// k distinct indices from [0, n), uniform over subsets (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(std::mt19937_64& g, std::size_t n,
                                                           std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(g, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

inline std::vector<std::size_t> shuffled_indices(std::mt19937_64& g, std::size_t n) {
  return sample_without_replacement(g, n, n);
}

}  // namespace blockwatch::rng
