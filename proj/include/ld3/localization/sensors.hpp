#pragma once

#include <limits>
#include <random>

#include "ld3/localization/ekf.hpp"
#include "ld3/localization/vehicle_model.hpp"

namespace ld3 {

struct GpsNoiseConfig {
  double sigma{0.5};  // m, per axis
};

struct LidarNoiseConfig {
  double sigma{0.1};          // m, per axis
  double inflate_prob{0.05};  // chance an epoch reports degraded matching
  double inflate_factor{25.0};  // covariance multiplier on degraded epochs
};

// Both simulators draw a fixed number of variates per call.
Measurement simulate_gps(const VehicleState& truth, const GpsNoiseConfig& cfg, std::mt19937_64& rng,
                         double timestamp = 0.0);
Measurement simulate_lidar_locator(const VehicleState& truth, const LidarNoiseConfig& cfg,
                                   std::mt19937_64& rng, double timestamp = 0.0);

enum class AttackDirection { kLeft, kRight };

/// GPS spoofer with exponentially growing lateral offset d * f^cycle.
struct AttackState {
  double d{2.0};
  double f{2.0};
  int cycle{0};
  AttackDirection direction{AttackDirection::kLeft};
  bool active{false};
  double max_offset{std::numeric_limits<double>::infinity()};

  double offset() const;
  /// Same attack, one GPS epoch later.
  AttackState advanced() const;
};

/// Offsets the measured position perpendicular to `lane_heading`. Inactive
/// attacks pass the measurement through.
Measurement spoof_gps(const Measurement& true_gps, const AttackState& a, double lane_heading);

}  // namespace ld3
