#pragma once

#include <optional>

#include "ld3/lane/lane_detect.hpp"
#include "ld3/localization/ekf.hpp"
#include "ld3/map/semantic_map.hpp"

namespace ld3 {

struct DetectorConfig {
  double dev_threshold{0.45};  // m; +inf disables the detector
  int confirm_window{5};       // consecutive exceedances before alarming
  bool suspend_in_intersection{true};
};

struct DetectorState {
  int consecutive_exceedances{0};
  double last_d{0.0};  // last LD deviation, reused when no line is usable
  bool alarmed{false};
  std::optional<double> alarm_time;
  std::optional<double> last_lane_width;  // fallback when the MSF pose is off-map
};

enum class Verdict { kBenign, kAlarm };

struct DetectorStep {
  DetectorState state;
  Verdict verdict{Verdict::kBenign};
  double d_ld{};
  double d_msf{};         // NaN when the MSF pose is off-map
  double disagreement{};  // |d_ld - d_msf|, NaN when off-map
  bool suspended{false};  // intersection freeze
  bool msf_off_map{false};
};

/// One LD-rate step of the LD-vs-MSF lateral consistency check. An off-map
/// MSF pose freezes the counter and is reported through `msf_off_map`
/// rather than raised.
DetectorStep ld3_step(const DetectorConfig& cfg, const DetectorState& st, const LdOutput& ld,
                      const MsfState& msf, const SemanticMap& map, double t);

}  // namespace ld3
