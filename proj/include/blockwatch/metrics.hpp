#pragma once

#include <cstddef>
#include <vector>

#include "blockwatch/error.hpp"

namespace blockwatch {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double balanced_accuracy = 0.0;  // mean of per-class recalls
  ClassMetrics cls[2];             // index = class label (0 benign, 1 malicious by convention)
};

/// Standard binary classification metrics. Zero-division conventions:
/// precision is 0 with no predicted positives, recall is 0 with no true
/// members, F1 is 0 when precision + recall is 0. Balanced accuracy averages
/// recalls over the classes present in y_true.
inline Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error(Errc::LengthMismatch, "y_true and y_pred lengths differ");
  if (y_true.empty()) throw Error(Errc::LengthMismatch, "empty label vectors");

  double tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i] ? 1 : 0;
    const int p = y_pred[i] ? 1 : 0;
    if (t == p) {
      tp[t] += 1.0;
    } else {
      fn[t] += 1.0;
      fp[p] += 1.0;
    }
  }

  Metrics m;
  double recall_sum = 0.0;
  int present = 0;
  for (int c = 0; c < 2; ++c) {
    const double predicted = tp[c] + fp[c];
    const double actual = tp[c] + fn[c];
    m.cls[c].precision = predicted > 0.0 ? tp[c] / predicted : 0.0;
    m.cls[c].recall = actual > 0.0 ? tp[c] / actual : 0.0;
    const double pr = m.cls[c].precision + m.cls[c].recall;
    m.cls[c].f1 = pr > 0.0 ? 2.0 * m.cls[c].precision * m.cls[c].recall / pr : 0.0;
    if (actual > 0.0) {
      recall_sum += m.cls[c].recall;
      ++present;
    }
  }
  m.balanced_accuracy = present > 0 ? recall_sum / present : 0.0;
  return m;
}

}  // namespace blockwatch
