#include "ld3/defense/savior.hpp"

#include <algorithm>
#include <cmath>

namespace ld3 {

double savior_residual(const MsfState& pred, const Measurement& gps) {
  return std::hypot(gps.position.x - pred.mean(0), gps.position.y - pred.mean(1));
}

CusumState cusum_step(const CusumState& cs, double residual, double expected) {
  const double e = residual - expected;
  CusumState n = cs;
  n.s_pos = std::max(0.0, cs.s_pos + e - cs.drift);
  n.s_neg = std::max(0.0, cs.s_neg - e - cs.drift);
  if (n.s_pos >= n.threshold || n.s_neg >= n.threshold) n.alarmed = true;
  return n;
}

}  // namespace ld3
