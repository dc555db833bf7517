#include "ld3/defense/detector.hpp"

#include <cmath>
#include <limits>


namespace ld3 {

DetectorStep ld3_step(const DetectorConfig& cfg, const DetectorState& st, const LdOutput& ld,
                      const MsfState& msf, const SemanticMap& map, double t) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  DetectorStep out;
  out.state = st;
  DetectorState& next = out.state;

  const Pose2D pose = msf.pose();
  std::optional<LaneProjection> proj;
  if (const LaneProjection p = map.project(pose); p.distance <= map.max_query_distance()) proj = p;

  if (proj) next.last_lane_width = map.lanes()[proj->lane].width;
  const double lane_width =
      next.last_lane_width ? *next.last_lane_width : map.lanes().front().width;
  out.d_ld = ld_dev(ld, lane_width, st.last_d);
  next.last_d = out.d_ld;

  if (!proj) {
    out.msf_off_map = true;
    out.d_msf = kNaN;
    out.disagreement = kNaN;
  } else {
    out.d_msf = proj->signed_dev;
    out.disagreement = std::abs(out.d_ld - out.d_msf);
    if (cfg.suspend_in_intersection && map.lanes()[proj->lane].is_intersection) {
      out.suspended = true;
    } else if (!next.alarmed) {
      if (out.disagreement > cfg.dev_threshold)
        ++next.consecutive_exceedances;
      else
        next.consecutive_exceedances = 0;
      if (next.consecutive_exceedances >= cfg.confirm_window) {
        next.alarmed = true;
        next.alarm_time = t;
      }
    }
  }
  out.verdict = next.alarmed ? Verdict::kAlarm : Verdict::kBenign;
  return out;
}

}  // namespace ld3
