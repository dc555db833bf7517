#include "ld3/pcd/locator.hpp"

#include "ld3/errors.hpp"

namespace ld3 {

namespace {

detail::SpatialGrid2D build_grid(const PointCloud& cloud, double cell) {
  std::vector<double> xs, ys, zs;
  xs.reserve(cloud.size());
  ys.reserve(cloud.size());
  zs.reserve(cloud.size());
  for (const auto& p : cloud) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    zs.push_back(p.z);
  }
  return detail::SpatialGrid2D(std::move(xs), std::move(ys), cell, std::move(zs));
}

}  // namespace

CentroidLocator::CentroidLocator(PointCloud reference, bool intensity_weighted,
                                 CentroidLocatorConfig cfg)
    : reference_(std::move(reference)),
      weighted_(intensity_weighted),
      cfg_(cfg),
      grid_(build_grid(reference_, 0.25)) {
  if (reference_.empty()) throw DegenerateCloud("locator reference cloud is empty");
}

LocatorOutput CentroidLocator::locate(const PointCloud& scan, Vec2 prior) const {
  if (scan.empty()) throw DegenerateCloud("empty scan");
  auto weight = [&](const PointRecord& p) { return weighted_ ? (p.intensity + 1.0) / 256.0 : 1.0; };

  double rx = 0.0, ry = 0.0, rw = 0.0;
  const double r2 = cfg_.window_radius * cfg_.window_radius;
  for (const auto& p : reference_) {
    const double dx = p.x - prior.x, dy = p.y - prior.y;
    if (dx * dx + dy * dy > r2) continue;
    const double w = weight(p);
    rx += w * p.x;
    ry += w * p.y;
    rw += w;
  }
  if (!(rw > 0.0)) throw DegenerateCloud("no reference points around the prior");

  double sx = 0.0, sy = 0.0, sw = 0.0;
  for (const auto& p : scan) {
    const double w = weight(p);
    sx += w * p.x;
    sy += w * p.y;
    sw += w;
  }
  LocatorOutput out;
  out.position = {rx / rw - sx / sw, ry / rw - sy / sw};

  double acc = 0.0;
  for (const auto& p : scan) {
    const auto hit = grid_.nearest(p.x + out.position.x, p.y + out.position.y,
                                   cfg_.residual_radius, p.z);
    acc += weight(p) * (hit ? hit->distance : cfg_.residual_radius);
  }
  out.uncertainty = acc / sw;
  return out;
}

std::unique_ptr<Locator> make_geometry_locator(PointCloud reference, CentroidLocatorConfig cfg) {
  return std::make_unique<CentroidLocator>(std::move(reference), false, cfg);
}

std::unique_ptr<Locator> make_intensity_locator(PointCloud reference, CentroidLocatorConfig cfg) {
  return std::make_unique<CentroidLocator>(std::move(reference), true, cfg);
}

}  // namespace ld3
