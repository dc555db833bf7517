#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ld3/pcd/point_cloud.hpp"

namespace ld3 {

struct Plane {
  double a{}, b{}, c{1.0}, d{};  // unit normal (a, b, c), c >= 0 when possible

  double distance(const PointRecord& p) const { return a * p.x + b * p.y + c * p.z + d; }
};

struct GroundModel {
  Plane plane;
  std::vector<std::size_t> inliers;  // ascending point indices
  double inlier_tolerance{};
};

using IndexTriple = std::array<std::size_t, 3>;

/// Plane through three points, or nothing when they are (nearly) collinear.
std::optional<Plane> plane_from_points(const PointRecord& p0, const PointRecord& p1,
                                       const PointRecord& p2);

std::vector<std::size_t> plane_inliers(std::span<const PointRecord> points, const Plane& plane,
                                       double tolerance);

/// RANSAC plane fit: the hypothesis with the most inliers wins, earlier
/// hypotheses win ties. `extra_hypotheses` are scored before the random
/// ones. Throws DegenerateCloud when fewer than three points are given or
/// every sampled triple is collinear.
GroundModel ransac_ground(std::span<const PointRecord> points, int iterations, double tolerance,
                          std::mt19937_64& rng,
                          std::span<const IndexTriple> extra_hypotheses = {});

}  // namespace ld3
