#pragma once

#include <span>

namespace lss {

/// Probability that a random positive outranks a random negative, ties
/// counting one half (Mann-Whitney U / (n_pos * n_neg)).
double auc_roc(std::span<const double> positive, std::span<const double> negative);

}  // namespace lss
