#pragma once

#include <span>
#include <vector>

namespace rogpl {

/// Unweighted mean of per-class F1 over every class that occurs in `truth`
/// or `preds`. With `c_plus_one` the kUnknown label is one of those
/// classes; without it kUnknown is left out of the average.
double macro_f1(std::span<const int> preds, std::span<const int> truth, bool c_plus_one = true);

/// Probability that a random positive outranks a random negative, ties
/// counted one half. Throws when either side is empty.
double auroc(std::span<const double> scores, const std::vector<bool>& is_positive);

}  // namespace rogpl
