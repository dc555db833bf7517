#include "ld3/defense/safe_stop.hpp"

#include <algorithm>

namespace ld3 {

double lane_keeping_steering(double lateral_dev, double heading_err, double speed,
                             const SafeStopConfig& cfg) {
  const double v = std::max(speed, cfg.v_floor);
  const double raw = -cfg.k_lat * lateral_dev / v - cfg.k_head * heading_err;
  return std::clamp(raw, -cfg.steering_limit, cfg.steering_limit);
}

ControlCmd safe_stop_control(double d_ld, double heading_err, double speed,
                             const SafeStopConfig& cfg, double dt) {
  if (speed <= 0.0) return {};
  ControlCmd cmd;
  cmd.accel = -std::min(cfg.decel, speed / dt);
  cmd.steering = lane_keeping_steering(d_ld, heading_err, speed, cfg);
  return cmd;
}

}  // namespace ld3
