#include "ld3/localization/vehicle_model.hpp"

#include <algorithm>
#include <cmath>

#include "ld3/errors.hpp"

namespace ld3 {

VehicleState bicycle_step(const VehicleState& s, const ControlCmd& u, double dt,
                          const BicycleCoeffs& c) {
  VehicleState n;
  n.x = s.x + c.c1 * s.speed * std::cos(s.heading) * dt;
  n.y = s.y + c.c2 * s.speed * std::sin(s.heading) * dt;
  n.heading = wrap_angle(s.heading + c.c3 * (s.speed / c.wheelbase) * std::tan(u.steering) * dt);
  n.speed = std::max(0.0, s.speed + c.c4 * u.accel * dt);
  return n;
}

namespace {

struct Accumulator {
  double rz{};
  double rr{};
  void add(double regressor, double target) {
    rz += regressor * target;
    rr += regressor * regressor;
  }
  double solve(const char* name) const {
    if (!(rr > 0.0)) throw DegenerateTrace(std::string("regressor for ") + name + " is all zero");
    return rz / rr;
  }
};

}  // namespace

BicycleCoeffs fit_bicycle_coeffs(std::span<const TraceSample> trace, double wheelbase) {
  if (trace.size() < 50) throw DegenerateTrace("trace needs at least 50 samples");
  if (!(wheelbase > 0.0)) throw DegenerateTrace("wheelbase must be > 0");
  Accumulator ax, ay, ah, av;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const auto& cur = trace[i];
    const auto& nxt = trace[i + 1].state;
    const double dt = cur.dt;
    const auto& s = cur.state;
    ax.add(s.speed * std::cos(s.heading) * dt, nxt.x - s.x);
    ay.add(s.speed * std::sin(s.heading) * dt, nxt.y - s.y);
    ah.add((s.speed / wheelbase) * std::tan(cur.cmd.steering) * dt,
           wrap_angle(nxt.heading - s.heading));
    if (nxt.speed > 0.0) av.add(cur.cmd.accel * dt, nxt.speed - s.speed);
  }
  return {ax.solve("c1"), ay.solve("c2"), ah.solve("c3"), av.solve("c4"), wheelbase};
}

}  // namespace ld3
