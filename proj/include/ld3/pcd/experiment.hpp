#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ld3/geometry.hpp"
#include "ld3/pcd/locator.hpp"
#include "ld3/pcd/marking.hpp"

namespace ld3 {

/// Scans in the sensor frame (translation only) with ground-truth sensor
/// positions.
struct LidarTrace {
  PointCloud reference;  // world frame, used to build locators
  std::vector<PointCloud> scans;
  std::vector<Vec2> truth;
  double lane_heading{0.0};
};

struct SyntheticTraceConfig {
  std::size_t count{20};
  std::uint64_t seed{1};
  double lane_width{3.5};
  double grid_step{0.1};     // ground sampling, m
  double scan_range{12.0};   // m
  double keep_prob{0.7};     // per-point return probability
};

/// Straight road along +x: ground grid with bright solid markings at
/// +-lane_width/2 and +-1.5 lane_width, roadside walls, poles and a few
/// parked boxes. Each scan has its own range noise level.
LidarTrace generate_synthetic_trace(const SyntheticTraceConfig& cfg);

struct VariantClouds {
  PointCloud original;
  PointCloud no_marking;
  WrongMarkingResult wrong_marking;
  GroundModel ground;
};

/// Ground segmentation plus both marking edits for one cloud. RANSAC is
/// seeded from cfg.seed and `index`.
VariantClouds make_variants(const PointCloud& cloud, const MarkingEditConfig& cfg,
                            std::size_t index);

struct DependencyReport {
  double r_no_marking{};
  double r_wrong_marking{};
  double rmse_original{};
  double rmse_no_marking{};
  double rmse_wrong_marking{};
  bool strong_no_marking{};    // r > 0.5
  bool strong_wrong_marking{};
  std::vector<double> uncertainty_original;
  std::vector<double> uncertainty_no_marking;
  std::vector<double> uncertainty_wrong_marking;
  std::size_t skipped_targets{};
};

inline constexpr double kStrongCorrelation = 0.5;

/// Runs `locator` on the original, no-marking and wrong-marking version of
/// every scan, correlates the uncertainty series against the original and
/// scores positions against ground truth. Throws LengthMismatch for an
/// empty trace or mismatched truth.
DependencyReport run_dependency_experiment(std::span<const PointCloud> scans,
                                           std::span<const Vec2> truth, const Locator& locator,
                                           const MarkingEditConfig& cfg);

}  // namespace ld3
