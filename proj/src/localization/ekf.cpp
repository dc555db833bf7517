#include "ld3/localization/ekf.hpp"

#include <cmath>

#include "ld3/errors.hpp"

namespace ld3 {

MsfState make_msf_state(const VehicleState& s, const Matrix4& cov) {
  MsfState m;
  m.mean << s.x, s.y, s.heading, s.speed;
  m.cov = cov;
  return m;
}

Matrix4 bicycle_jacobian(const VehicleState& s, const ControlCmd& u, double dt,
                         const BicycleCoeffs& c) {
  const double ch = std::cos(s.heading);
  const double sh = std::sin(s.heading);
  Matrix4 f = Matrix4::Identity();
  f(0, 2) = -c.c1 * s.speed * sh * dt;
  f(0, 3) = c.c1 * ch * dt;
  f(1, 2) = c.c2 * s.speed * ch * dt;
  f(1, 3) = c.c2 * sh * dt;
  f(2, 3) = c.c3 * std::tan(u.steering) * dt / c.wheelbase;
  // Speed clamp at zero kills the sensitivity.
  if (s.speed + c.c4 * u.accel * dt <= 0.0) f(3, 3) = 0.0;
  return f;
}

MsfState ekf_predict(const MsfState& s, const ControlCmd& u, double dt, const BicycleCoeffs& c,
                     const Matrix4& q) {
  const VehicleState v = s.vehicle();
  const Matrix4 f = bicycle_jacobian(v, u, dt, c);
  const VehicleState n = bicycle_step(v, u, dt, c);
  MsfState out;
  out.mean << n.x, n.y, n.heading, n.speed;
  out.cov = f * s.cov * f.transpose() + q;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

MsfState ekf_update(const MsfState& s, const Measurement& m) {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Matrix2 innov_cov = h * s.cov * h.transpose() + m.uncertainty;
  const Eigen::LLT<Matrix2> llt(innov_cov);
  if (llt.info() != Eigen::Success || !(innov_cov.determinant() > 0.0))
    throw SingularInnovation("innovation covariance is not positive definite");
  const Eigen::Matrix<double, 4, 2> gain = llt.solve(h * s.cov).transpose();
  const Eigen::Vector2d innovation{m.position.x - s.mean(0), m.position.y - s.mean(1)};

  MsfState out;
  out.mean = s.mean + gain * innovation;
  out.mean(2) = wrap_angle(out.mean(2));
  const Matrix4 ikh = Matrix4::Identity() - gain * h;
  out.cov = ikh * s.cov * ikh.transpose() + gain * m.uncertainty * gain.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace ld3
