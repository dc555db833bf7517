#include "ld3/lane/lane_detect.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ld3/errors.hpp"

namespace ld3 {

LanePoly::LanePoly(std::initializer_list<double> coeffs)
    : LanePoly(std::span<const double>(coeffs.begin(), coeffs.size())) {}

LanePoly::LanePoly(std::span<const double> coeffs) {
  if (coeffs.size() > kMaxCoeffs) throw std::invalid_argument("lane polynomial degree > 3");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(coeffs[i])) throw std::invalid_argument("non-finite lane coefficient");
    c_[i] = coeffs[i];
  }
}

double LanePoly::operator()(double x) const noexcept {
  double y = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) y = y * x + *it;
  return y;
}

namespace {

enum class Side { kLeft, kRight, kNone };

Side choose_line(const LdOutput& ld) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double d_left = ld.left ? std::abs((*ld.left)(0.0)) : kInf;
  const double d_right = ld.right ? std::abs((*ld.right)(0.0)) : kInf;
  if (ld.left && d_left < d_right) return Side::kLeft;
  if (ld.right && d_right < d_left) return Side::kRight;
  return Side::kNone;
}

}  // namespace

double ld_dev(const LdOutput& ld, double lw_map, double last_d) {
  if (!(lw_map > 0.0)) throw InvalidLaneWidth("lane width must be > 0");
  switch (choose_line(ld)) {
    case Side::kLeft:
      return lw_map / 2.0 - std::abs((*ld.left)(0.0));
    case Side::kRight:
      return std::abs((*ld.right)(0.0)) - lw_map / 2.0;
    case Side::kNone:
      break;
  }
  return last_d;
}

double ld_heading_err(const LdOutput& ld, double last) {
  // A line at slope dy/dx = m in the vehicle frame means the vehicle points
  // atan(m) to the right of the lane.
  switch (choose_line(ld)) {
    case Side::kLeft:
      return -std::atan(ld.left->coefficients()[1]);
    case Side::kRight:
      return -std::atan(ld.right->coefficients()[1]);
    case Side::kNone:
      break;
  }
  return last;
}

LdOutput simulate_ld(const Pose2D& true_pose, const SemanticMap& map, const LdNoiseConfig& cfg,
                     std::mt19937_64& rng, double timestamp) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double n_left = gauss(rng);
  const double n_right = gauss(rng);
  const double n_slope_left = gauss(rng);
  const double n_slope_right = gauss(rng);
  const double u_drop_left = unit(rng);
  const double u_drop_right = unit(rng);
  const double u_wrong = unit(rng);
  const double u_side = unit(rng);

  LdOutput out;
  out.timestamp = timestamp;

  const LanePoint lp = map.lane_point(true_pose);
  if (map.is_intersection(true_pose)) return out;

  const double dev = map.lane_dev(true_pose);
  const double lw = map.lane_width(true_pose);
  const double slope = -std::tan(wrap_angle(true_pose.heading - lp.heading));

  double c_left = lw / 2.0 - dev + cfg.lateral_sigma * n_left;
  double c_right = -(lw / 2.0 + dev) + cfg.lateral_sigma * n_right;
  if (u_wrong < cfg.wrong_line_prob) {
    // Mis-detected line lands one lane further out.
    if (u_side < 0.5)
      c_left += lw;
    else
      c_right -= lw;
  }
  if (u_drop_left >= cfg.dropout_prob)
    out.left = LanePoly{c_left, slope + cfg.heading_sigma * n_slope_left};
  if (u_drop_right >= cfg.dropout_prob)
    out.right = LanePoly{c_right, slope + cfg.heading_sigma * n_slope_right};
  return out;
}

}  // namespace ld3
