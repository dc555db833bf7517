#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ld3/harness/scenario.hpp"

namespace ld3 {

// INI-style scenario files: [section] headers with key = value lines.
// Unknown sections or keys are rejected so typos cannot silently fall back
// to defaults. Every section is optional.
//
//   [scenario] name duration seed
//   [map]      kind (straight|curved|file) file length lane_width curve_radius curve_angle
//   [rates]    control gps lidar ld
//   [vehicle]  speed target_speed speed_gain accel_min accel_max wheelbase steer_noise accel_noise
//   [noise]    gps_sigma lidar_sigma lidar_inflate_prob lidar_inflate_factor
//   [ld]       lateral_sigma heading_sigma dropout_prob wrong_line_prob
//   [msf]      q_pos q_heading q_speed init_pos_sigma init_heading_sigma init_speed_sigma
//   [attack]   enabled d f direction (left|right) start_time max_offset
//   [detector] dev_threshold (number or inf) confirm_window suspend_in_intersection
//   [safestop] decel k_lat k_head steering_limit v_floor
ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical text form of every field; parse_config(write) reproduces the config.
std::string config_to_string(const ScenarioConfig& cfg);

}  // namespace ld3
