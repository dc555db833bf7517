#pragma once

#include <span>

#include "ld3/geometry.hpp"

namespace ld3 {

struct VehicleState {
  double x{};
  double y{};
  double heading{};  // (-pi, pi]
  double speed{};    // >= 0

  Pose2D pose() const { return {x, y, heading}; }
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ControlCmd {
  double steering{};  // front-wheel angle, + left
  double accel{};     // m/s^2

  friend bool operator==(const ControlCmd&, const ControlCmd&) = default;
};

/// Multipliers on the four kinematic bicycle equations (x, y, heading,
/// speed). The identity coefficients give the textbook model.
struct BicycleCoeffs {
  double c1{1.0};
  double c2{1.0};
  double c3{1.0};
  double c4{1.0};
  double wheelbase{2.7};
};

VehicleState bicycle_step(const VehicleState& s, const ControlCmd& u, double dt,
                          const BicycleCoeffs& c = {});

/// One row of a sensor/control trace. `dt` is the step from this row to the
/// next one.
struct TraceSample {
  VehicleState state;
  ControlCmd cmd;
  double dt{};
};

/// Least-squares fit of c1..c4 on one-step transitions. Each coefficient is
/// linear in its own equation, so the four 1-D problems are solved
/// independently. Speed transitions that hit the zero clamp are excluded.
/// Throws DegenerateTrace for fewer than 50 samples or an all-zero regressor.
BicycleCoeffs fit_bicycle_coeffs(std::span<const TraceSample> trace, double wheelbase = 2.7);

}  // namespace ld3
