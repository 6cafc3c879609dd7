#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trihet {

/// Rank-based ROC AUC: (concordant + 0.5 * tied positive/negative pairs) / (P * N).
/// Throws unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Step-wise average precision, sum_n (R_n - R_{n-1}) P_n over descending
/// score thresholds; tied scores form one threshold. Throws without positives.
double average_precision(std::span<const double> scores, std::span<const int> labels);

struct RepeatMetrics {
  double auc = 0.0;  // fractions in [0, 1]
  double ap = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::string method;
  std::size_t repeats = 0;
  std::size_t failures = 0;
  double auc_mean = 0.0;  // percentages
  double auc_std = 0.0;
  double ap_mean = 0.0;
  double ap_std = 0.0;
  bool std_undefined = false;  // single repeat: std reported as 0
  std::uint64_t config_hash = 0;
  std::uint64_t eval_pairs_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<RepeatMetrics> per_repeat;
};

/// Mean and sample standard deviation (n - 1), as percentages.
EvalReport aggregate(std::span<const RepeatMetrics> repeats);

/// Labels for `pos` positives followed by `neg` negatives.
std::vector<int> stacked_labels(std::size_t pos, std::size_t neg);

}  // namespace trihet
