#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blockwatch/error.hpp"
#include "blockwatch/types.hpp"

namespace blockwatch {

/// Per-account malicious-tag sequence over the sub-datasets of one
/// granularity. An account contributes an element only for sub-datasets it
/// transacted in; absence is skipped, not treated as benign.
struct BehaviorVector {
  std::string account;
  Granularity granularity = Granularity::All;
  std::vector<int> elements;  // 0/1 in sub-dataset order

  std::size_t n() const { return elements.size(); }
};

inline BehaviorVector behavior_vector(const std::string& account, Granularity granularity,
                                      const std::map<std::size_t, int>& per_sd_flags) {
  if (per_sd_flags.empty()) throw Error(Errc::EmptyVector, "account appears in no sub-dataset");
  BehaviorVector v;
  v.account = account;
  v.granularity = granularity;
  for (const auto& [sd, flag] : per_sd_flags) v.elements.push_back(flag ? 1 : 0);
  return v;
}

/// Number of adjacent unequal pairs M_j != M_{j+1}.
inline int change_count(const BehaviorVector& v) {
  if (v.elements.empty()) throw Error(Errc::EmptyVector, "empty behavior vector");
  int changes = 0;
  for (std::size_t j = 1; j < v.elements.size(); ++j)
    changes += v.elements[j] != v.elements[j - 1] ? 1 : 0;
  return changes;
}

/// Mean of the 0/1 elements: the account's probability of being malicious at
/// this granularity.
inline double malicious_probability(const BehaviorVector& v) {
  if (v.elements.empty()) throw Error(Errc::EmptyVector, "empty behavior vector");
  double sum = 0.0;
  for (int e : v.elements) sum += e;
  return sum / static_cast<double>(v.elements.size());
}

struct GranularityReport {
  // change-count histogram restricted to accounts that changed at least once
  std::map<int, std::size_t> change_histogram;
  // p_m histogram; keys rounded to 9 decimals for stable plotting
  std::map<double, std::size_t> pm_histogram;
  std::vector<std::string> pm_zero_cohort;      // never flagged, >= 1 appearance
  std::vector<std::string> pm_positive_cohort;  // p_m >= threshold
};

inline double round9(double v) { return std::round(v * 1e9) / 1e9; }

/// Distribution tables per granularity. pm_threshold selects the
/// "flagged often" cohort; the p_m = 0 cohort is always emitted as the
/// suspect-candidate list.
inline std::map<Granularity, GranularityReport> granularity_report(
    const std::vector<BehaviorVector>& vectors, double pm_threshold = 0.5) {
  if (vectors.empty()) return {};
  std::map<Granularity, GranularityReport> out;
  for (const BehaviorVector& v : vectors) {
    GranularityReport& rep = out[v.granularity];
    const int changes = change_count(v);
    if (changes >= 1) ++rep.change_histogram[changes];
    const double pm = malicious_probability(v);
    ++rep.pm_histogram[round9(pm)];
    if (pm == 0.0) rep.pm_zero_cohort.push_back(v.account);
    if (pm >= pm_threshold) rep.pm_positive_cohort.push_back(v.account);
  }
  return out;
}

inline std::string bitstring(const BehaviorVector& v) {
  std::string s;
  s.reserve(v.elements.size());
  for (int e : v.elements) s.push_back(e ? '1' : '0');
  return s;
}

}  // namespace blockwatch
