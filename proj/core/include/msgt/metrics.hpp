#pragma once

#include <string>
#include <vector>

namespace msgt {

struct MetricsReport {
  double acc = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;        // meaningful only when roc_auc_error is empty
  std::string roc_auc_error;   // set when AUC is undefined (single-class split)
  int positives = 0;
  int negatives = 0;
};

// Rank-statistic ROC-AUC with 0.5 credit for ties (Mann-Whitney U). Throws
// std::invalid_argument when only one class is present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Acc and F1 at the given threshold (class 1 = SL is the positive class),
// plus ROC-AUC when defined. F1 is 0 when the denominator vanishes.
MetricsReport compute_metrics(const std::vector<double>& scores,
                              const std::vector<int>& labels, double threshold = 0.5);

}  // namespace msgt
