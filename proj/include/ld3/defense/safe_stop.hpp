#pragma once

#include "ld3/localization/vehicle_model.hpp"

namespace ld3 {

struct SafeStopConfig {
  double decel{3.0};           // m/s^2
  double k_lat{0.2};           // lateral gain
  double k_head{0.3};          // heading gain
  double steering_limit{0.5};  // rad
  double v_floor{1.0};         // m/s, keeps the lateral term bounded near standstill
};

/// Speed-scaled proportional steering on lateral deviation (+ left) and
/// heading error (vehicle minus lane), saturated at the steering limit.
double lane_keeping_steering(double lateral_dev, double heading_err, double speed,
                             const SafeStopConfig& cfg);

/// Braking command that keeps the vehicle in lane using LD-derived
/// deviation. Deceleration is limited so speed lands exactly on zero over
/// `dt`; at rest the command is zero.
ControlCmd safe_stop_control(double d_ld, double heading_err, double speed,
                             const SafeStopConfig& cfg, double dt);

}  // namespace ld3
