#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ld3/geometry.hpp"

namespace ld3 {

struct LanePoint {
  double x{};
  double y{};
  double heading{};  // lane tangent, (-pi, pi]

  friend bool operator==(const LanePoint&, const LanePoint&) = default;
};

struct Lane {
  std::string id;
  std::vector<LanePoint> centerline;  // at least two distinct consecutive points
  double width{};
  bool is_intersection{false};

  /// Builds a lane from raw vertices. Vertex headings are the segment
  /// heading at the ends and the circular mean of the two adjacent segment
  /// headings at interior vertices. Throws std::invalid_argument when the
  /// invariants do not hold.
  static Lane from_points(std::string id, const std::vector<Vec2>& points, double width,
                          bool is_intersection = false);

  friend bool operator==(const Lane&, const Lane&) = default;
};

/// Result of projecting a pose onto the nearest lane centerline.
struct LaneProjection {
  std::size_t lane{};
  std::size_t segment{};
  LanePoint point;
  double distance{};    // Euclidean distance pose -> point
  double signed_dev{};  // +distance when the pose is left of the centerline
};

/// Lane-level map. Immutable after construction and safe to share between
/// threads.
class SemanticMap {
 public:
  static constexpr double kDefaultMaxQueryDistance = 10.0;

  explicit SemanticMap(std::vector<Lane> lanes,
                       double max_query_distance = kDefaultMaxQueryDistance);

  const std::vector<Lane>& lanes() const noexcept { return lanes_; }
  double max_query_distance() const noexcept { return max_query_distance_; }

  /// Nearest-lane projection with no distance bound. Ties between segments
  /// and between lanes resolve to the earlier one.
  LaneProjection project(const Pose2D& pose) const;

  // Bounded map APIs. Each throws NoLaneFound when the pose is farther than
  // max_query_distance() from every centerline.
  double lane_dev(const Pose2D& pose) const;
  double lane_width(const Pose2D& pose) const;
  LanePoint lane_point(const Pose2D& pose) const;
  bool is_intersection(const Pose2D& pose) const;

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;

 private:
  LaneProjection bounded(const Pose2D& pose) const;

  std::vector<Lane> lanes_;
  double max_query_distance_;
};

/// One straight lane along +x starting at the origin.
SemanticMap build_straight_map(double length, double width);

/// A straight lead-in along +x followed by a left-hand arc, sampled every
/// `step` meters.
SemanticMap build_curved_map(double straight_length, double radius, double arc_angle,
                             double width, double step = 5.0);

// Text format:
//   # comment
//   lane <id> <width> <is_intersection: 0|1|true|false>
//   pt <x> <y>
SemanticMap parse_map(std::istream& in);
SemanticMap load_map(const std::filesystem::path& path);
void write_map(std::ostream& out, const SemanticMap& map);
void save_map(const std::filesystem::path& path, const SemanticMap& map);

}  // namespace ld3
