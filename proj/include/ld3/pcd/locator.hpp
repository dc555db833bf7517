#pragma once

#include <memory>
#include <string>

#include "ld3/detail/spatial_grid.hpp"
#include "ld3/geometry.hpp"
#include "ld3/pcd/point_cloud.hpp"

namespace ld3 {

struct LocatorOutput {
  Vec2 position;
  double uncertainty{};
};

/// Matches a sensor-frame scan (translation only) against a world-frame
/// reference cloud.
class Locator {
 public:
  virtual ~Locator() = default;
  virtual LocatorOutput locate(const PointCloud& scan, Vec2 prior) const = 0;
  virtual std::string name() const = 0;
};

struct CentroidLocatorConfig {
  double window_radius{12.0};    // reference points considered around the prior
  double residual_radius{1.0};   // nearest-neighbour search cap; misses count as this
};

/// Centroid alignment of the scan against the reference window around the
/// prior, scored by mean nearest-neighbour residual. With
/// `intensity_weighted` every centroid and residual is weighted by
/// (intensity + 1) / 256; otherwise intensities are never read.
class CentroidLocator final : public Locator {
 public:
  CentroidLocator(PointCloud reference, bool intensity_weighted, CentroidLocatorConfig cfg = {});

  LocatorOutput locate(const PointCloud& scan, Vec2 prior) const override;
  std::string name() const override { return weighted_ ? "intensity" : "geometry"; }

 private:
  PointCloud reference_;
  bool weighted_;
  CentroidLocatorConfig cfg_;
  detail::SpatialGrid2D grid_;
};

std::unique_ptr<Locator> make_geometry_locator(PointCloud reference, CentroidLocatorConfig cfg = {});
std::unique_ptr<Locator> make_intensity_locator(PointCloud reference, CentroidLocatorConfig cfg = {});

}  // namespace ld3
