#pragma once

#include <cstdint>
#include <optional>

#include "ld3/pcd/ground.hpp"
#include "ld3/pcd/point_cloud.hpp"

namespace ld3 {

struct MarkingEditConfig {
  std::optional<double> intensity_threshold;  // default: ground median + 3 * MAD
  double lane_width{3.5};
  double lane_heading{0.0};  // rad, in the cloud's frame
  int offset_side{+1};       // +1 shifts markings to the left of the lane heading, -1 right
  double match_radius{0.2};  // m
  std::uint64_t seed{7};
  int ransac_iterations{200};
  double ransac_tolerance{0.05};  // m
};

double ground_median_intensity(const PointCloud& points, const GroundModel& g);

/// Threshold actually used for marking detection under `cfg`.
double marking_threshold(const PointCloud& points, const GroundModel& g,
                         const MarkingEditConfig& cfg);

/// Ground inliers brighter than `threshold`, ascending.
std::vector<std::size_t> marking_points(const PointCloud& points, const GroundModel& g,
                                        double threshold);

/// Flattens every ground point to the ground median intensity.
PointCloud make_no_marking(const PointCloud& points, const GroundModel& g);

struct WrongMarkingResult {
  PointCloud points;
  std::size_t markings{};   // marking points found
  std::size_t moved{};      // markings copied to an offset target
  std::size_t skipped{};    // markings with no ground point within match_radius of the target
  double threshold{};
  double median{};
};

/// Copies each marking's intensity onto the ground point nearest to the
/// position lane_width/2 to the configured side, then flattens the original
/// markings to the ground median.
WrongMarkingResult make_wrong_marking(const PointCloud& points, const GroundModel& g,
                                      const MarkingEditConfig& cfg);

}  // namespace ld3
