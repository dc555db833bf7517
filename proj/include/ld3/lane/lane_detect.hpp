#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>

#include "ld3/geometry.hpp"
#include "ld3/map/semantic_map.hpp"

namespace ld3 {

/// Bird's-eye-view lane line y(x) in the vehicle frame (x forward, y left),
/// coefficients lowest degree first, at most cubic.
class LanePoly {
 public:
  static constexpr std::size_t kMaxCoeffs = 4;

  LanePoly() = default;
  LanePoly(std::initializer_list<double> coeffs);
  explicit LanePoly(std::span<const double> coeffs);

  double operator()(double x) const noexcept;
  const std::array<double, kMaxCoeffs>& coefficients() const noexcept { return c_; }

  friend bool operator==(const LanePoly&, const LanePoly&) = default;

 private:
  std::array<double, kMaxCoeffs> c_{};
};

inline double poly_eval(const LanePoly& p, double x) { return p(x); }

struct LdOutput {
  std::optional<LanePoly> left;
  std::optional<LanePoly> right;
  double timestamp{};

  friend bool operator==(const LdOutput&, const LdOutput&) = default;
};

struct LdNoiseConfig {
  double lateral_sigma{0.05};    // m, on the constant term
  double heading_sigma{0.002};   // rad-equivalent, on the linear term
  double dropout_prob{0.05};
  double wrong_line_prob{0.02};  // at most one line per frame is wrong
  std::uint64_t seed{1};
};

/// Signed deviation of the vehicle from the lane centerline (+ left) from LD
/// lane lines. Uses the nearer line with the map lane width; equal distances
/// or no lines fall back to `last_d`. Throws InvalidLaneWidth for lw_map <= 0.
double ld_dev(const LdOutput& ld, double lw_map, double last_d);

/// Vehicle heading minus lane heading, read from the slope of the same line
/// `ld_dev` selects. Falls back to `last` under the same conditions.
double ld_heading_err(const LdOutput& ld, double last);

/// Synthetic lane detector. Lines are straight in the vehicle frame: the
/// constant term is the perpendicular distance to the line (left positive,
/// right negative) and the slope encodes the relative heading. Consumes a
/// fixed number of draws from `rng` per call, so streams stay aligned across
/// scenarios that share a seed. Intersections yield no lines.
LdOutput simulate_ld(const Pose2D& true_pose, const SemanticMap& map, const LdNoiseConfig& cfg,
                     std::mt19937_64& rng, double timestamp = 0.0);

}  // namespace ld3
