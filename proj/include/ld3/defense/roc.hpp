#pragma once

#include <span>
#include <vector>

namespace ld3 {

struct RocPoint {
  double fpr{};
  double tpr{};
  double threshold{};  // runs with score >= threshold are flagged

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Threshold sweep over run-level scores (higher = more suspicious).
/// Starts at (0,0) and ends at (1,1). Throws OneClassOnly unless both
/// labels are present.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const bool> attacked);

/// Trapezoidal area under an ROC polyline.
double roc_auc(std::span<const RocPoint> roc);

/// Largest TPR among points with FPR == 0.
double tpr_at_zero_fpr(std::span<const RocPoint> roc);

}  // namespace ld3
