#include "trihet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trihet {

namespace {

std::vector<std::size_t> order_by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

void check_lengths(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("NaN score");
  }
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const auto idx = order_by_score_desc(scores);
  double positives = 0.0;
  double negatives = 0.0;
  for (int y : labels) (y ? positives : negatives) += 1.0;
  if (positives == 0.0 || negatives == 0.0) throw std::invalid_argument("auc needs both classes");

  // Walk tie blocks from the highest score: each negative in a block is beaten
  // by every positive seen in earlier blocks and ties with those in its own.
  double credit = 0.0;
  double pos_above = 0.0;
  for (std::size_t b = 0; b < idx.size();) {
    std::size_t e = b;
    double pos_block = 0.0;
    double neg_block = 0.0;
    while (e < idx.size() && scores[idx[e]] == scores[idx[b]]) {
      (labels[idx[e]] ? pos_block : neg_block) += 1.0;
      ++e;
    }
    credit += neg_block * (pos_above + 0.5 * pos_block);
    pos_above += pos_block;
    b = e;
  }
  return credit / (positives * negatives);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const auto idx = order_by_score_desc(scores);
  double positives = 0.0;
  for (int y : labels) positives += y ? 1.0 : 0.0;
  if (positives == 0.0) throw std::invalid_argument("average precision needs at least one positive");

  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  double ap = 0.0;
  for (std::size_t b = 0; b < idx.size();) {
    std::size_t e = b;
    while (e < idx.size() && scores[idx[e]] == scores[idx[b]]) {
      (labels[idx[e]] ? tp : fp) += 1.0;
      ++e;
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    b = e;
  }
  return ap;
}

EvalReport aggregate(std::span<const RepeatMetrics> repeats) {
  if (repeats.empty()) throw std::invalid_argument("aggregate needs at least one repeat");
  EvalReport r;
  r.repeats = repeats.size();
  r.per_repeat.assign(repeats.begin(), repeats.end());
  const auto n = static_cast<double>(repeats.size());
  double auc_sum = 0.0;
  double ap_sum = 0.0;
  for (const auto& m : repeats) {
    auc_sum += m.auc;
    ap_sum += m.ap;
  }
  const double auc_mean = auc_sum / n;
  const double ap_mean = ap_sum / n;
  double auc_ss = 0.0;
  double ap_ss = 0.0;
  for (const auto& m : repeats) {
    auc_ss += (m.auc - auc_mean) * (m.auc - auc_mean);
    ap_ss += (m.ap - ap_mean) * (m.ap - ap_mean);
  }
  r.auc_mean = 100.0 * auc_mean;
  r.ap_mean = 100.0 * ap_mean;
  if (repeats.size() > 1) {
    r.auc_std = 100.0 * std::sqrt(auc_ss / (n - 1.0));
    r.ap_std = 100.0 * std::sqrt(ap_ss / (n - 1.0));
  } else {
    r.std_undefined = true;
  }
  return r;
}

std::vector<int> stacked_labels(std::size_t pos, std::size_t neg) {
  std::vector<int> labels(pos + neg, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(pos), 1);
  return labels;
}

}  // namespace trihet
