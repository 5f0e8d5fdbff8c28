#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

/// Summary statistics applied to each raw series. The set is fixed but
/// configurable; quantiles and the median are first-class since they
/// describe these series best.
enum class Stat {
  Min,
  Max,
  Mean,
  Median,
  StdDev,
  Q10,
  Q25,
  Q75,
  Q90,
  Sum,
  CountAboveMean,
  LongestRunAboveMean,
};

inline const char* stat_name(Stat s) {
  switch (s) {
    case Stat::Min: return "min";
    case Stat::Max: return "max";
    case Stat::Mean: return "mean";
    case Stat::Median: return "median";
    case Stat::StdDev: return "stddev";
    case Stat::Q10: return "q10";
    case Stat::Q25: return "q25";
    case Stat::Q75: return "q75";
    case Stat::Q90: return "q90";
    case Stat::Sum: return "sum";
    case Stat::CountAboveMean: return "count_above_mean";
    case Stat::LongestRunAboveMean: return "longest_run_above_mean";
  }
  return "?";
}

inline Stat parse_stat(const std::string& s) {
  for (Stat st : {Stat::Min, Stat::Max, Stat::Mean, Stat::Median, Stat::StdDev, Stat::Q10,
                  Stat::Q25, Stat::Q75, Stat::Q90, Stat::Sum, Stat::CountAboveMean,
                  Stat::LongestRunAboveMean}) {
    if (s == stat_name(st)) return st;
  }
  throw Error(Errc::ConfigError, "unknown statistic '" + s + "'");
}

struct StatisticCatalog {
  std::vector<Stat> stats;

  static StatisticCatalog default_catalog() {
    return {{Stat::Min, Stat::Max, Stat::Mean, Stat::Median, Stat::StdDev, Stat::Q10, Stat::Q25,
             Stat::Q75, Stat::Q90, Stat::Sum, Stat::CountAboveMean, Stat::LongestRunAboveMean}};
  }

  std::size_t size() const { return stats.size(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(stats.size());
    for (Stat s : stats) out.emplace_back(stat_name(s));
    return out;
  }
};

/// Quantile with linear interpolation between order statistics.
/// `sorted` must be ascending and nonempty.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// One value per catalog entry, in catalog order. Empty series map to the
/// zero vector: absent activity is imputed as 0 throughout the pipeline.
inline std::vector<double> summarize(const TimeSeries& series, const StatisticCatalog& catalog) {
  std::vector<double> out(catalog.size(), 0.0);
  if (series.empty()) return out;

  const std::vector<double> values = series.values();
  const std::size_t n = values.size();
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  const double mean = sum / static_cast<double>(n);

  for (std::size_t k = 0; k < catalog.stats.size(); ++k) {
    switch (catalog.stats[k]) {
      case Stat::Min: out[k] = sorted.front(); break;
      case Stat::Max: out[k] = sorted.back(); break;
      case Stat::Mean: out[k] = mean; break;
      case Stat::Median: out[k] = quantile_sorted(sorted, 0.5); break;
      case Stat::StdDev: {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        out[k] = std::sqrt(ss / static_cast<double>(n));
        break;
      }
      case Stat::Q10: out[k] = quantile_sorted(sorted, 0.10); break;
      case Stat::Q25: out[k] = quantile_sorted(sorted, 0.25); break;
      case Stat::Q75: out[k] = quantile_sorted(sorted, 0.75); break;
      case Stat::Q90: out[k] = quantile_sorted(sorted, 0.90); break;
      case Stat::Sum: out[k] = sum; break;
      case Stat::CountAboveMean: {
        double c = 0.0;
        for (double v : values)
          if (v > mean) c += 1.0;
        out[k] = c;
        break;
      }
      case Stat::LongestRunAboveMean: {
        std::size_t best = 0, run = 0;
        for (double v : values) {
          run = v > mean ? run + 1 : 0;
          best = std::max(best, run);
        }
        out[k] = static_cast<double>(best);
        break;
      }
    }
  }
  return out;
}

}  // namespace blockwatch
