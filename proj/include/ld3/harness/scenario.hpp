#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ld3/defense/detector.hpp"
#include "ld3/defense/safe_stop.hpp"
#include "ld3/lane/lane_detect.hpp"
#include "ld3/localization/ekf.hpp"
#include "ld3/localization/sensors.hpp"
#include "ld3/localization/vehicle_model.hpp"
#include "ld3/map/semantic_map.hpp"

namespace ld3 {

struct MapSpec {
  enum class Kind { kStraight, kCurved, kFile };
  Kind kind{Kind::kStraight};
  std::filesystem::path file;
  double length{2000.0};       // straight map, and the lead-in of the curved one
  double lane_width{3.5};
  double curve_radius{400.0};
  double curve_angle{1.5};     // rad
};

SemanticMap build_map(const MapSpec& spec);

struct Rates {
  double control{100.0};
  double gps{10.0};
  double lidar{5.0};
  double ld{20.0};
};

struct AttackConfig {
  bool enabled{false};
  double d{2.0};
  double f{2.0};
  AttackDirection direction{AttackDirection::kLeft};
  double start_time{10.0};
  double max_offset{100.0};  // m, spoofer saturates here
};

struct MsfConfig {
  // Per-control-step process noise variances on x, y, heading, speed.
  double q_pos{1e-5};
  double q_heading{2e-7};
  double q_speed{1e-5};
  double init_pos_sigma{0.1};
  double init_heading_sigma{0.01};
  double init_speed_sigma{0.1};
};

struct ScenarioConfig {
  std::string name{"default"};
  MapSpec map;
  double duration{40.0};
  Rates rates;
  std::uint64_t seed{1};

  VehicleState initial{0.0, 0.0, 0.0, 15.0};
  double target_speed{15.0};
  double speed_gain{0.5};  // 1/s
  double accel_min{-6.0};
  double accel_max{2.0};
  BicycleCoeffs truth_coeffs;
  double steer_noise{0.002};  // rad, actuation noise on the true vehicle
  double accel_noise{0.05};   // m/s^2

  GpsNoiseConfig gps;
  LidarNoiseConfig lidar;
  LdNoiseConfig ld;
  MsfConfig msf;
  AttackConfig attack;
  DetectorConfig detector;
  SafeStopConfig safestop;

  bool keep_log{true};
};

/// Throws ConfigError on invalid values.
void validate(const ScenarioConfig& cfg);

enum class ControlSource { kMsf = 0, kLd = 1 };

struct TraceRow {
  double t{};
  VehicleState truth;
  bool gps_valid{};
  Vec2 gps;
  double gps_var{};
  bool spoofed{};
  bool lidar_valid{};
  Vec2 lidar;
  VehicleState msf;
  bool ld_valid{};
  bool left_present{};
  std::array<double, 4> left{};
  bool right_present{};
  std::array<double, 4> right{};
  double d_ld{};
  double d_msf{};
  double delta{};
  int counter{};
  bool alarmed{};
  double steering{};
  double accel{};
  ControlSource source{ControlSource::kMsf};
  double true_dev{};

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct RunResult {
  bool alarmed{false};
  std::optional<double> alarm_time;
  std::optional<double> detection_latency;
  double max_true_lateral_dev{0.0};
  double final_speed{0.0};
  double final_lateral_dev{0.0};
  double max_disagreement{0.0};
  /// Largest disagreement sustained over confirm_window consecutive LD
  /// samples; the detector alarms iff this exceeds dev_threshold.
  double ld3_score{0.0};
  std::size_t ld_samples{0};
  std::size_t gps_samples{0};
  std::size_t lidar_samples{0};
  std::size_t off_map_steps{0};
  std::vector<TraceRow> rows;
};

/// Fixed-step closed loop: true vehicle, sensors (GPS possibly spoofed),
/// MSF EKF, LD, detector and controller. Before the alarm the vehicle lane
/// keeps on its MSF belief; after it, safe_stop_control runs on LD
/// deviation. Deterministic given the config.
RunResult run_scenario(const ScenarioConfig& cfg);
RunResult run_scenario(const ScenarioConfig& cfg, const SemanticMap& map);

}  // namespace ld3
