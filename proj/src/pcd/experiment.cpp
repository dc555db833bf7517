#include "ld3/pcd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ld3/errors.hpp"
#include "ld3/pcd/stats.hpp"

namespace ld3 {

namespace {

double clamp_intensity(double v) { return std::clamp(v, 0.0, 255.0); }

}  // namespace

LidarTrace generate_synthetic_trace(const SyntheticTraceConfig& cfg) {
  if (cfg.count == 0) throw LengthMismatch("synthetic trace needs at least one scan");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  LidarTrace trace;
  const double spacing = 4.0;
  const double length = spacing * static_cast<double>(cfg.count) + 2.0 * cfg.scan_range + 4.0;
  const double half_road = 1.5 * cfg.lane_width + 0.75;
  const double lines[] = {-1.5 * cfg.lane_width, -0.5 * cfg.lane_width, 0.5 * cfg.lane_width,
                          1.5 * cfg.lane_width};
  const double stripe_half = 0.075;

  auto& ref = trace.reference;
  const int nx = static_cast<int>(std::round(length / cfg.grid_step));
  const int ny = static_cast<int>(std::round(2.0 * half_road / cfg.grid_step));
  for (int i = 0; i <= nx; ++i) {
    const double x = i * cfg.grid_step;
    for (int j = 0; j <= ny; ++j) {
      const double y = -half_road + j * cfg.grid_step;
      bool on_line = false;
      for (double l : lines) on_line = on_line || std::abs(y - l) <= stripe_half + 1e-9;
      const double base = on_line ? 185.0 + 8.0 * gauss(rng) : 30.0 + 4.0 * gauss(rng);
      ref.push_back({x, y, 0.0, clamp_intensity(base)});
    }
  }
  // Roadside walls with periodic texture.
  for (const double wy : {-half_road - 3.0, half_road + 3.0}) {
    for (double x = 0.0; x <= length; x += 0.25)
      for (double z = 0.25; z <= 4.0; z += 0.25)
        ref.push_back({x, wy, z, clamp_intensity(90.0 + 40.0 * std::sin(0.7 * x) + 5.0 * gauss(rng))});
  }
  // Poles.
  for (double x = 3.0; x <= length; x += 11.0)
    for (const double py : {-half_road - 1.5, half_road + 1.5})
      for (double z = 0.1; z <= 5.0; z += 0.1) ref.push_back({x, py, z, 140.0});
  // Parked boxes at random spots on the shoulders.
  const int boxes = static_cast<int>(cfg.count / 2 + 2);
  for (int b = 0; b < boxes; ++b) {
    const double bx = unit(rng) * (length - 5.0);
    const double by = (unit(rng) < 0.5 ? -1.0 : 1.0) * (half_road + 1.0 + unit(rng));
    for (double dx = 0.0; dx <= 4.0; dx += 0.2)
      for (double dz = 0.2; dz <= 1.5; dz += 0.2) ref.push_back({bx + dx, by, dz, 70.0});
  }

  for (std::size_t k = 0; k < cfg.count; ++k) {
    const Vec2 pos{cfg.scan_range + 2.0 + spacing * static_cast<double>(k) + 0.5 * unit(rng),
                   0.4 * (unit(rng) - 0.5)};
    const double sigma = 0.01 + 0.03 * unit(rng);
    const double r2 = cfg.scan_range * cfg.scan_range;
    PointCloud scan;
    for (const auto& p : ref) {
      const double dx = p.x - pos.x, dy = p.y - pos.y;
      // Draws are unconditional so every scan consumes the same stream length.
      const double keep = unit(rng);
      const double nx_ = gauss(rng), ny_ = gauss(rng), nz_ = gauss(rng), ni = gauss(rng);
      if (dx * dx + dy * dy > r2 || keep >= cfg.keep_prob) continue;
      scan.push_back({dx + sigma * nx_, dy + sigma * ny_, p.z + sigma * nz_,
                      clamp_intensity(p.intensity + 3.0 * ni)});
    }
    trace.scans.push_back(std::move(scan));
    trace.truth.push_back(pos);
  }
  return trace;
}

VariantClouds make_variants(const PointCloud& cloud, const MarkingEditConfig& cfg,
                            std::size_t index) {
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + index);
  VariantClouds v;
  v.original = cloud;
  v.ground = ransac_ground(cloud, cfg.ransac_iterations, cfg.ransac_tolerance, rng);
  v.no_marking = make_no_marking(cloud, v.ground);
  v.wrong_marking = make_wrong_marking(cloud, v.ground, cfg);
  return v;
}

DependencyReport run_dependency_experiment(std::span<const PointCloud> scans,
                                           std::span<const Vec2> truth, const Locator& locator,
                                           const MarkingEditConfig& cfg) {
  if (scans.empty()) throw LengthMismatch("dependency experiment needs at least one cloud");
  if (scans.size() != truth.size()) throw LengthMismatch("clouds and ground truth differ in length");

  DependencyReport rep;
  std::vector<Vec2> pos_orig, pos_no, pos_wrong;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const VariantClouds v = make_variants(scans[i], cfg, i);
    rep.skipped_targets += v.wrong_marking.skipped;
    const auto o = locator.locate(v.original, truth[i]);
    const auto n = locator.locate(v.no_marking, truth[i]);
    const auto w = locator.locate(v.wrong_marking.points, truth[i]);
    pos_orig.push_back(o.position);
    pos_no.push_back(n.position);
    pos_wrong.push_back(w.position);
    rep.uncertainty_original.push_back(o.uncertainty);
    rep.uncertainty_no_marking.push_back(n.uncertainty);
    rep.uncertainty_wrong_marking.push_back(w.uncertainty);
  }
  rep.r_no_marking = pearson_r(rep.uncertainty_original, rep.uncertainty_no_marking);
  rep.r_wrong_marking = pearson_r(rep.uncertainty_original, rep.uncertainty_wrong_marking);
  rep.rmse_original = rmse(pos_orig, truth);
  rep.rmse_no_marking = rmse(pos_no, truth);
  rep.rmse_wrong_marking = rmse(pos_wrong, truth);
  rep.strong_no_marking = rep.r_no_marking > kStrongCorrelation;
  rep.strong_wrong_marking = rep.r_wrong_marking > kStrongCorrelation;
  return rep;
}

}  // namespace ld3
