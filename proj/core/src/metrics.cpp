#include "msgt/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace msgt {

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: score/label length mismatch");
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int y : labels) pos += y != 0;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_auc: undefined for a single-class split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // average ranks over tied scores, 1-based
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double rank_sum_pos = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (labels[k] != 0) rank_sum_pos += rank[k];
  const double u = rank_sum_pos - 0.5 * static_cast<double>(pos) * (pos + 1);
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport compute_metrics(const std::vector<double>& scores,
                              const std::vector<int>& labels, double threshold) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("compute_metrics: score/label length mismatch");
  if (scores.empty()) throw std::invalid_argument("compute_metrics: empty split");

  MetricsReport r;
  long tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (actual) ++r.positives;
    else ++r.negatives;
    if (predicted && actual) ++tp;
    else if (predicted && !actual) ++fp;
    else if (!predicted && actual) ++fn;
    else ++tn;
  }
  r.acc = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
  const double f1_den = static_cast<double>(2 * tp + fp + fn);
  r.f1 = f1_den > 0.0 ? 2.0 * static_cast<double>(tp) / f1_den : 0.0;
  try {
    r.roc_auc = roc_auc(scores, labels);
  } catch (const std::invalid_argument& e) {
    r.roc_auc_error = e.what();
    r.roc_auc = 0.0;
  }
  return r;
}

}  // namespace msgt
