#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

namespace ld3::detail {

/// Uniform bucket grid on (x, y) over a fixed point set for radius-bounded
/// nearest-neighbour queries. With z values the distance is 3-D. Ties go to
/// the lowest index.
class SpatialGrid2D {
 public:
  struct Hit {
    std::size_t index{};
    double distance{};
  };

  SpatialGrid2D(std::vector<double> xs, std::vector<double> ys, double cell,
                std::vector<double> zs = {})
      : xs_(std::move(xs)), ys_(std::move(ys)), zs_(std::move(zs)), cell_(cell) {
    for (std::size_t i = 0; i < xs_.size(); ++i) buckets_[key(cell_of(xs_[i]), cell_of(ys_[i]))].push_back(i);
  }

  std::optional<Hit> nearest(double x, double y, double max_radius, double z = 0.0) const {
    const auto reach = static_cast<std::int64_t>(std::ceil(max_radius / cell_));
    const std::int64_t cx = cell_of(x), cy = cell_of(y);
    std::optional<Hit> best;
    auto scan_cell = [&](std::int64_t ix, std::int64_t iy) {
      const auto it = buckets_.find(key(ix, iy));
      if (it == buckets_.end()) return;
      for (std::size_t i : it->second) {
        const double d = zs_.empty() ? std::hypot(xs_[i] - x, ys_[i] - y)
                                     : std::hypot(xs_[i] - x, ys_[i] - y, zs_[i] - z);
        if (d > max_radius) continue;
        if (!best || d < best->distance || (d == best->distance && i < best->index)) best = Hit{i, d};
      }
    };
    // Rings of cells in Chebyshev order; anything outside ring r is at least
    // r * cell away in the plane.
    for (std::int64_t r = 0; r <= reach; ++r) {
      if (r == 0) {
        scan_cell(cx, cy);
      } else {
        for (std::int64_t i = -r; i <= r; ++i) {
          scan_cell(cx + i, cy - r);
          scan_cell(cx + i, cy + r);
        }
        for (std::int64_t j = -r + 1; j <= r - 1; ++j) {
          scan_cell(cx - r, cy + j);
          scan_cell(cx + r, cy + j);
        }
      }
      if (best && best->distance < static_cast<double>(r) * cell_) break;
    }
    return best;
  }

  /// Indices within `radius`, ascending.
  std::vector<std::size_t> within(double x, double y, double radius) const {
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
    const std::int64_t cx = cell_of(x), cy = cell_of(y);
    std::vector<std::size_t> out;
    for (std::int64_t ix = cx - reach; ix <= cx + reach; ++ix) {
      for (std::int64_t iy = cy - reach; iy <= cy + reach; ++iy) {
        const auto it = buckets_.find(key(ix, iy));
        if (it == buckets_.end()) continue;
        for (std::size_t i : it->second)
          if (std::hypot(xs_[i] - x, ys_[i] - y) <= radius) out.push_back(i);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix) << 32) ^ (static_cast<std::uint64_t>(iy) & 0xffffffffULL);
  }

  std::vector<double> xs_, ys_, zs_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace ld3::detail
