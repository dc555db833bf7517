#include "ld3/defense/roc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ld3/errors.hpp"

namespace ld3 {

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const bool> attacked) {
  if (scores.size() != attacked.size()) throw LengthMismatch("scores and labels differ in length");
  const auto n_pos = static_cast<std::size_t>(std::count(attacked.begin(), attacked.end(), true));
  const std::size_t n_neg = attacked.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw OneClassOnly("ROC needs both benign and attacked runs");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> roc;
  roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    // Consume every run tied at this threshold before emitting a point.
    while (i < order.size() && scores[order[i]] == thr) {
      if (attacked[order[i]])
        ++tp;
      else
        ++fp;
      ++i;
    }
    roc.push_back({static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos, thr});
  }
  return roc;
}

double roc_auc(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i)
    area += (roc[i].fpr - roc[i - 1].fpr) * 0.5 * (roc[i].tpr + roc[i - 1].tpr);
  return area;
}

double tpr_at_zero_fpr(std::span<const RocPoint> roc) {
  double best = 0.0;
  for (const auto& p : roc)
    if (p.fpr == 0.0) best = std::max(best, p.tpr);
  return best;
}

}  // namespace ld3
