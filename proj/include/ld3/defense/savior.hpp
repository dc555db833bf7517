#pragma once

#include "ld3/localization/ekf.hpp"

namespace ld3 {

/// Distance between the filter's predicted position and a GPS fix.
double savior_residual(const MsfState& pred, const Measurement& gps);

/// Two-sided CUSUM on (residual - expected) with drift `drift` and alarm
/// threshold `threshold`. The alarm latches.
struct CusumState {
  double s_pos{0.0};
  double s_neg{0.0};
  double drift{0.0};
  double threshold{1.0};
  bool alarmed{false};

  double statistic() const { return s_pos > s_neg ? s_pos : s_neg; }
};

CusumState cusum_step(const CusumState& cs, double residual, double expected);

}  // namespace ld3
