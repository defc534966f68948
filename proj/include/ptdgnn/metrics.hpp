#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ptdgnn {

// AUC by the rank-statistic (Mann-Whitney) route with average ranks for ties;
// numerically identical to the pairwise count of wins plus half-ties.
inline double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::runtime_error("auc: empty score list");
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) all.push_back({s, true});
  for (double s : neg_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (all[k].positive) rank_sum_pos += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(pos_scores.size());
  const double nn = static_cast<double>(neg_scores.size());
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

// Average precision with step interpolation over the ranked list. Equal
// scores rank negatives first (pessimistic for the positives).
inline double average_precision(const std::vector<double>& pos_scores,
                                const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::runtime_error("average_precision: empty score list");
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : neg_scores) all.push_back({s, false});
  for (double s : pos_scores) all.push_back({s, true});
  std::stable_sort(all.begin(), all.end(),
                   [](const Entry& a, const Entry& b) { return a.score > b.score; });

  double ap = 0.0;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!all[k].positive) continue;
    ++tp;
    ap += static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  return ap / static_cast<double>(pos_scores.size());
}

// F1 at a fixed threshold; a score at the threshold counts as predicted
// positive.
inline double f1_score(const std::vector<double>& pos_scores,
                       const std::vector<double>& neg_scores, double threshold = 0.5) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::runtime_error("f1_score: empty score list");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (double s : pos_scores) (s >= threshold ? tp : fn)++;
  for (double s : neg_scores) {
    if (s >= threshold) ++fp;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

inline MeanStd mean_stddev(const std::vector<double>& values) {
  if (values.empty()) throw std::runtime_error("mean_stddev: empty input");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace ptdgnn
