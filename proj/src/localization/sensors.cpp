#include "ld3/localization/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace ld3 {

Measurement simulate_gps(const VehicleState& truth, const GpsNoiseConfig& cfg, std::mt19937_64& rng,
                         double timestamp) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double nx = gauss(rng);
  const double ny = gauss(rng);
  Measurement m;
  m.kind = SensorKind::kGps;
  m.position = {truth.x + cfg.sigma * nx, truth.y + cfg.sigma * ny};
  const double var = std::max(cfg.sigma * cfg.sigma, 1e-12);
  m.uncertainty = var * Matrix2::Identity();
  m.timestamp = timestamp;
  return m;
}

Measurement simulate_lidar_locator(const VehicleState& truth, const LidarNoiseConfig& cfg,
                                   std::mt19937_64& rng, double timestamp) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double nx = gauss(rng);
  const double ny = gauss(rng);
  const bool inflated = unit(rng) < cfg.inflate_prob;
  const double scale = inflated ? cfg.inflate_factor : 1.0;
  const double sigma = cfg.sigma * std::sqrt(scale);
  Measurement m;
  m.kind = SensorKind::kLidar;
  m.position = {truth.x + sigma * nx, truth.y + sigma * ny};
  const double var = std::max(cfg.sigma * cfg.sigma, 1e-12) * scale;
  m.uncertainty = var * Matrix2::Identity();
  m.timestamp = timestamp;
  return m;
}

double AttackState::offset() const {
  return std::min(d * std::pow(f, cycle), max_offset);
}

AttackState AttackState::advanced() const {
  AttackState n = *this;
  ++n.cycle;
  return n;
}

Measurement spoof_gps(const Measurement& true_gps, const AttackState& a, double lane_heading) {
  if (!a.active) return true_gps;
  const double sign = a.direction == AttackDirection::kLeft ? 1.0 : -1.0;
  Measurement m = true_gps;
  m.position = m.position + (sign * a.offset()) * left_normal(lane_heading);
  return m;
}

}  // namespace ld3
