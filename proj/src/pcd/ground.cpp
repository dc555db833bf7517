#include "ld3/pcd/ground.hpp"

#include <cmath>

#include "ld3/errors.hpp"

namespace ld3 {

std::optional<Plane> plane_from_points(const PointRecord& p0, const PointRecord& p1,
                                       const PointRecord& p2) {
  const double ux = p1.x - p0.x, uy = p1.y - p0.y, uz = p1.z - p0.z;
  const double vx = p2.x - p0.x, vy = p2.y - p0.y, vz = p2.z - p0.z;
  double nx = uy * vz - uz * vy;
  double ny = uz * vx - ux * vz;
  double nz = ux * vy - uy * vx;
  const double n = std::sqrt(nx * nx + ny * ny + nz * nz);
  const double scale = std::sqrt((ux * ux + uy * uy + uz * uz) * (vx * vx + vy * vy + vz * vz));
  if (!(n > 1e-9 * scale) || !(scale > 0.0)) return std::nullopt;
  nx /= n;
  ny /= n;
  nz /= n;
  if (nz < 0.0 || (nz == 0.0 && (ny < 0.0 || (ny == 0.0 && nx < 0.0)))) {
    nx = -nx;
    ny = -ny;
    nz = -nz;
  }
  double d = -(nx * p0.x + ny * p0.y + nz * p0.z);
  if (d == 0.0) d = 0.0;  // drop negative zero
  return Plane{nx, ny, nz, d};
}

std::vector<std::size_t> plane_inliers(std::span<const PointRecord> points, const Plane& plane,
                                       double tolerance) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (std::abs(plane.distance(points[i])) <= tolerance) idx.push_back(i);
  return idx;
}

namespace {

std::size_t count_inliers(std::span<const PointRecord> points, const Plane& plane,
                          double tolerance) {
  std::size_t n = 0;
  for (const auto& p : points)
    if (std::abs(plane.distance(p)) <= tolerance) ++n;
  return n;
}

}  // namespace

GroundModel ransac_ground(std::span<const PointRecord> points, int iterations, double tolerance,
                          std::mt19937_64& rng, std::span<const IndexTriple> extra_hypotheses) {
  if (points.size() < 3) throw DegenerateCloud("need at least 3 points for a plane");
  std::optional<Plane> best;
  std::size_t best_count = 0;

  auto consider = [&](const IndexTriple& t) {
    const auto plane = plane_from_points(points[t[0]], points[t[1]], points[t[2]]);
    if (!plane) return;
    const std::size_t count = count_inliers(points, *plane, tolerance);
    if (!best || count > best_count) {
      best = plane;
      best_count = count;
    }
  };

  for (const auto& t : extra_hypotheses) {
    if (t[0] >= points.size() || t[1] >= points.size() || t[2] >= points.size())
      throw std::out_of_range("hypothesis index out of range");
    consider(t);
  }

  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  for (int it = 0; it < iterations; ++it) {
    IndexTriple t{pick(rng), pick(rng), pick(rng)};
    while (t[1] == t[0]) t[1] = pick(rng);
    while (t[2] == t[0] || t[2] == t[1]) t[2] = pick(rng);
    consider(t);
  }
  if (!best) throw DegenerateCloud("every sampled point triple is collinear");
  return {*best, plane_inliers(points, *best, tolerance), tolerance};
}

}  // namespace ld3
