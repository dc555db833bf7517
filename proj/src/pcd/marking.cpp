#include "ld3/pcd/marking.hpp"

#include <cmath>

#include "ld3/detail/spatial_grid.hpp"
#include "ld3/geometry.hpp"
#include "ld3/pcd/stats.hpp"

namespace ld3 {

namespace {

std::vector<double> ground_intensities(const PointCloud& points, const GroundModel& g) {
  std::vector<double> v;
  v.reserve(g.inliers.size());
  for (std::size_t i : g.inliers) v.push_back(points[i].intensity);
  return v;
}

}  // namespace

double ground_median_intensity(const PointCloud& points, const GroundModel& g) {
  return lower_median(ground_intensities(points, g));
}

double marking_threshold(const PointCloud& points, const GroundModel& g,
                         const MarkingEditConfig& cfg) {
  if (cfg.intensity_threshold) return *cfg.intensity_threshold;
  const auto v = ground_intensities(points, g);
  return lower_median(v) + 3.0 * median_abs_deviation(v);
}

std::vector<std::size_t> marking_points(const PointCloud& points, const GroundModel& g,
                                        double threshold) {
  std::vector<std::size_t> idx;
  for (std::size_t i : g.inliers)
    if (points[i].intensity > threshold) idx.push_back(i);
  return idx;
}

PointCloud make_no_marking(const PointCloud& points, const GroundModel& g) {
  PointCloud out = points;
  if (g.inliers.empty()) return out;
  const double med = ground_median_intensity(points, g);
  for (std::size_t i : g.inliers) out[i].intensity = med;
  return out;
}

WrongMarkingResult make_wrong_marking(const PointCloud& points, const GroundModel& g,
                                      const MarkingEditConfig& cfg) {
  WrongMarkingResult res;
  res.points = points;
  if (g.inliers.empty()) return res;
  res.median = ground_median_intensity(points, g);
  res.threshold = marking_threshold(points, g, cfg);
  const auto marks = marking_points(points, g, res.threshold);
  res.markings = marks.size();
  if (marks.empty()) return res;

  std::vector<double> gx, gy;
  gx.reserve(g.inliers.size());
  gy.reserve(g.inliers.size());
  for (std::size_t i : g.inliers) {
    gx.push_back(points[i].x);
    gy.push_back(points[i].y);
  }
  const detail::SpatialGrid2D grid(std::move(gx), std::move(gy), cfg.match_radius);
  const Vec2 shift = (cfg.offset_side * cfg.lane_width / 2.0) * left_normal(cfg.lane_heading);

  for (std::size_t m : marks) {
    const auto hit = grid.nearest(points[m].x + shift.x, points[m].y + shift.y, cfg.match_radius);
    if (!hit) {
      ++res.skipped;
      continue;
    }
    res.points[g.inliers[hit->index]].intensity = points[m].intensity;
    ++res.moved;
  }
  for (std::size_t m : marks) res.points[m].intensity = res.median;
  return res;
}

}  // namespace ld3
