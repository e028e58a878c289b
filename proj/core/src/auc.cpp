#include "lss/auc.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lss/error.hpp"

namespace lss {

double auc_roc(std::span<const double> positive, std::span<const double> negative) {
  require(!positive.empty() && !negative.empty(), ErrorKind::kInvalidArgument,
          "AUC needs at least one positive and one negative score");
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positive.size() + negative.size());
  for (double s : positive) all.push_back({s, true});
  for (double s : negative) all.push_back({s, false});
  for (const auto& e : all) require(!std::isnan(e.score), ErrorKind::kInvalidArgument, "AUC scores must not be NaN");
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Sum of positive midranks (1-based).
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].positive) rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(positive.size());
  const double nn = static_cast<double>(negative.size());
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace lss
