#pragma once

#include <Eigen/Dense>

#include "ld3/geometry.hpp"
#include "ld3/localization/vehicle_model.hpp"

namespace ld3 {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Matrix2 = Eigen::Matrix2d;

/// Filter belief over [x, y, heading, speed].
struct MsfState {
  Vector4 mean = Vector4::Zero();
  Matrix4 cov = Matrix4::Identity();

  VehicleState vehicle() const { return {mean(0), mean(1), mean(2), mean(3)}; }
  Pose2D pose() const { return {mean(0), mean(1), mean(2)}; }
  Vec2 position() const { return {mean(0), mean(1)}; }
};

MsfState make_msf_state(const VehicleState& s, const Matrix4& cov);

enum class SensorKind { kGps, kLidar };

struct Measurement {
  SensorKind kind{SensorKind::kGps};
  Vec2 position;
  Matrix2 uncertainty = Matrix2::Identity();
  double timestamp{};
};

/// Jacobian of bicycle_step w.r.t. the state at (s, u).
Matrix4 bicycle_jacobian(const VehicleState& s, const ControlCmd& u, double dt,
                         const BicycleCoeffs& c);

MsfState ekf_predict(const MsfState& s, const ControlCmd& u, double dt, const BicycleCoeffs& c,
                     const Matrix4& q);

/// Position update in Joseph form, symmetrized. Throws SingularInnovation
/// when the innovation covariance cannot be inverted.
MsfState ekf_update(const MsfState& s, const Measurement& m);

}  // namespace ld3
