#include "rogpl/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rogpl/types.hpp"

namespace rogpl {

double macro_f1(std::span<const int> preds, std::span<const int> truth, bool c_plus_one) {
  if (preds.size() != truth.size()) throw DimensionError("macro_f1: length mismatch");
  if (preds.empty()) throw std::invalid_argument("macro_f1: empty input");
  struct Counts {
    long tp = 0, fp = 0, fn = 0;
  };
  std::map<int, Counts> per_class;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == truth[i]) {
      ++per_class[truth[i]].tp;
    } else {
      ++per_class[preds[i]].fp;
      ++per_class[truth[i]].fn;
    }
  }
  double sum = 0.0;
  int classes = 0;
  for (const auto& [label, c] : per_class) {
    if (!c_plus_one && label == kUnknown) continue;
    const long denom = 2 * c.tp + c.fp + c.fn;
    sum += denom > 0 ? 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom) : 0.0;
    ++classes;
  }
  return classes > 0 ? sum / classes : 0.0;
}

double auroc(std::span<const double> scores, const std::vector<bool>& is_positive) {
  const std::size_t n = scores.size();
  if (is_positive.size() != n) throw DimensionError("auroc: length mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based ranks i+1 .. j share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]]) {
        positive_rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw std::invalid_argument("auroc: need both positive and negative samples");
  }
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace rogpl
