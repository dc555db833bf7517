#include "ld3/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "ld3/errors.hpp"

namespace ld3 {

SemanticMap build_map(const MapSpec& spec) {
  switch (spec.kind) {
    case MapSpec::Kind::kStraight:
      return build_straight_map(spec.length, spec.lane_width);
    case MapSpec::Kind::kCurved:
      return build_curved_map(spec.length, spec.curve_radius, spec.curve_angle, spec.lane_width);
    case MapSpec::Kind::kFile:
      return load_map(spec.file);
  }
  throw ConfigError("unknown map kind");
}

namespace {

int period_steps(double control_rate, double sensor_rate, const char* name) {
  const double ratio = control_rate / sensor_rate;
  const double r = std::round(ratio);
  if (r < 1.0 || std::abs(ratio - r) > 1e-9)
    throw ConfigError(std::string(name) + " rate must divide the control rate");
  return static_cast<int>(r);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

// Running max over windows of `w` consecutive samples of the window minimum.
class SustainedMax {
 public:
  explicit SustainedMax(int w) : w_(static_cast<std::size_t>(std::max(w, 1))) {}
  void push(double v) {
    win_.push_back(v);
    if (win_.size() > w_) win_.pop_front();
    if (win_.size() == w_) best_ = std::max(best_, *std::min_element(win_.begin(), win_.end()));
  }
  double value() const { return best_; }

 private:
  std::size_t w_;
  std::deque<double> win_;
  double best_{0.0};
};

}  // namespace

void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.duration > 0.0, "duration must be > 0");
  require(c.rates.control > 0.0 && c.rates.gps > 0.0 && c.rates.lidar > 0.0 && c.rates.ld > 0.0,
          "rates must be > 0");
  period_steps(c.rates.control, c.rates.gps, "gps");
  period_steps(c.rates.control, c.rates.lidar, "lidar");
  period_steps(c.rates.control, c.rates.ld, "ld");
  require(c.map.lane_width > 0.0, "lane_width must be > 0");
  require(c.map.kind != MapSpec::Kind::kFile || !c.map.file.empty(), "map kind 'file' needs map.file");
  require(c.initial.speed >= 0.0, "initial speed must be >= 0");
  require(c.truth_coeffs.wheelbase > 0.0, "wheelbase must be > 0");
  require(c.gps.sigma >= 0.0 && c.lidar.sigma >= 0.0, "sensor sigmas must be >= 0");
  require(c.lidar.inflate_prob >= 0.0 && c.lidar.inflate_prob <= 1.0, "inflate_prob in [0,1]");
  require(c.lidar.inflate_factor >= 1.0, "inflate_factor must be >= 1");
  require(c.ld.lateral_sigma >= 0.0 && c.ld.heading_sigma >= 0.0, "ld sigmas must be >= 0");
  require(c.ld.dropout_prob >= 0.0 && c.ld.dropout_prob <= 1.0, "dropout_prob in [0,1]");
  require(c.ld.wrong_line_prob >= 0.0 && c.ld.wrong_line_prob <= 1.0, "wrong_line_prob in [0,1]");
  require(c.detector.dev_threshold > 0.0, "dev_threshold must be > 0");
  require(c.detector.confirm_window >= 1, "confirm_window must be >= 1");
  require(c.safestop.decel > 0.0 && c.safestop.k_lat > 0.0 && c.safestop.k_head > 0.0 &&
              c.safestop.steering_limit > 0.0 && c.safestop.v_floor > 0.0,
          "safestop parameters must be > 0");
  require(c.accel_min < 0.0 && c.accel_max > 0.0, "accel limits must straddle 0");
  if (c.attack.enabled) {
    require(c.attack.d > 0.0, "attack d must be > 0");
    require(c.attack.f >= 1.0, "attack f must be >= 1");
    require(c.attack.start_time >= 0.0 && c.attack.start_time < c.duration,
            "attack start_time must lie in [0, duration)");
    require(c.attack.max_offset > 0.0, "attack max_offset must be > 0");
  }
}

RunResult run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, build_map(cfg.map)); }

RunResult run_scenario(const ScenarioConfig& cfg, const SemanticMap& map) {
  validate(cfg);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  const double dt = 1.0 / cfg.rates.control;
  const int p_gps = period_steps(cfg.rates.control, cfg.rates.gps, "gps");
  const int p_lidar = period_steps(cfg.rates.control, cfg.rates.lidar, "lidar");
  const int p_ld = period_steps(cfg.rates.control, cfg.rates.ld, "ld");
  const auto steps = static_cast<long>(std::llround(cfg.duration * cfg.rates.control));

  auto rng_act = stream(cfg.seed, 0);
  auto rng_gps = stream(cfg.seed, 1);
  auto rng_lidar = stream(cfg.seed, 2);
  auto rng_ld = stream(cfg.seed, 3);
  auto rng_init = stream(cfg.seed, 4);
  std::normal_distribution<double> gauss(0.0, 1.0);

  VehicleState truth = cfg.initial;
  truth.heading = wrap_angle(truth.heading);

  const auto& m = cfg.msf;
  Matrix4 q = Matrix4::Zero();
  q.diagonal() << m.q_pos, m.q_pos, m.q_heading, m.q_speed;
  Matrix4 p0 = Matrix4::Zero();
  p0.diagonal() << m.init_pos_sigma * m.init_pos_sigma, m.init_pos_sigma * m.init_pos_sigma,
      m.init_heading_sigma * m.init_heading_sigma, m.init_speed_sigma * m.init_speed_sigma;
  VehicleState belief = truth;
  belief.x += m.init_pos_sigma * gauss(rng_init);
  belief.y += m.init_pos_sigma * gauss(rng_init);
  belief.heading = wrap_angle(belief.heading + m.init_heading_sigma * gauss(rng_init));
  belief.speed = std::max(0.0, belief.speed + m.init_speed_sigma * gauss(rng_init));
  MsfState msf = make_msf_state(belief, p0);
  const BicycleCoeffs nominal{1.0, 1.0, 1.0, 1.0, cfg.truth_coeffs.wheelbase};

  AttackState attack;
  attack.d = cfg.attack.d;
  attack.f = cfg.attack.f;
  attack.direction = cfg.attack.direction;
  attack.max_offset = cfg.attack.max_offset;

  DetectorState det;
  LdOutput last_ld;
  double heading_err_ld = 0.0;
  double last_delta = kNaN;
  double last_d_msf = kNaN;
  SustainedMax sustained(cfg.detector.confirm_window);

  RunResult res;
  if (cfg.keep_log) res.rows.reserve(static_cast<std::size_t>(steps));

  auto true_dev = [&](const VehicleState& s) { return map.project(s.pose()).signed_dev; };

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    TraceRow row;
    row.t = t;
    row.truth = truth;
    row.true_dev = true_dev(truth);
    res.max_true_lateral_dev = std::max(res.max_true_lateral_dev, std::abs(row.true_dev));

    if (k % p_gps == 0) {
      Measurement gps = simulate_gps(truth, cfg.gps, rng_gps, t);
      attack.active = cfg.attack.enabled && t >= cfg.attack.start_time;
      if (attack.active) {
        gps = spoof_gps(gps, attack, map.project(truth.pose()).point.heading);
        attack = attack.advanced();
        row.spoofed = true;
      }
      msf = ekf_update(msf, gps);
      row.gps_valid = true;
      row.gps = gps.position;
      row.gps_var = gps.uncertainty(0, 0);
      ++res.gps_samples;
    } else {
      row.gps = {kNaN, kNaN};
      row.gps_var = kNaN;
    }

    if (k % p_lidar == 0) {
      const Measurement lidar = simulate_lidar_locator(truth, cfg.lidar, rng_lidar, t);
      msf = ekf_update(msf, lidar);
      row.lidar_valid = true;
      row.lidar = lidar.position;
      ++res.lidar_samples;
    } else {
      row.lidar = {kNaN, kNaN};
    }

    if (k % p_ld == 0) {
      try {
        last_ld = simulate_ld(truth.pose(), map, cfg.ld, rng_ld, t);
      } catch (const NoLaneFound&) {
        // Far off the mapped road there are no lane lines to detect.
        last_ld = LdOutput{{}, {}, t};
      }
      const DetectorStep step = ld3_step(cfg.detector, det, last_ld, msf, map, t);
      det = step.state;
      heading_err_ld = ld_heading_err(last_ld, heading_err_ld);
      last_delta = step.disagreement;
      last_d_msf = step.d_msf;
      if (step.msf_off_map) ++res.off_map_steps;
      if (!step.msf_off_map && !step.suspended) {
        sustained.push(step.disagreement);
        res.max_disagreement = std::max(res.max_disagreement, step.disagreement);
      }
      row.ld_valid = true;
      ++res.ld_samples;
    }
    row.left_present = last_ld.left.has_value();
    if (last_ld.left) row.left = last_ld.left->coefficients();
    row.right_present = last_ld.right.has_value();
    if (last_ld.right) row.right = last_ld.right->coefficients();
    row.d_ld = det.last_d;
    row.d_msf = last_d_msf;
    row.delta = last_delta;
    row.counter = det.consecutive_exceedances;
    row.alarmed = det.alarmed;
    row.msf = msf.vehicle();

    // Wheel speed is not affected by GPS spoofing.
    const double wheel_speed = truth.speed;
    ControlCmd cmd;
    if (det.alarmed) {
      cmd = safe_stop_control(det.last_d, heading_err_ld, wheel_speed, cfg.safestop, dt);
      row.source = ControlSource::kLd;
    } else {
      const LaneProjection belief_proj = map.project(msf.pose());
      const double heading_err = wrap_angle(msf.mean(2) - belief_proj.point.heading);
      cmd.steering =
          lane_keeping_steering(belief_proj.signed_dev, heading_err, wheel_speed, cfg.safestop);
      cmd.accel = std::clamp(cfg.speed_gain * (cfg.target_speed - wheel_speed), cfg.accel_min,
                             cfg.accel_max);
      row.source = ControlSource::kMsf;
    }
    row.steering = cmd.steering;
    row.accel = cmd.accel;

    const double n_steer = gauss(rng_act);
    const double n_accel = gauss(rng_act);
    ControlCmd actual = cmd;
    if (truth.speed > 0.0) actual.steering += cfg.steer_noise * n_steer;
    // Commands that bring the vehicle to rest are held exactly (brake hold).
    if (truth.speed + cmd.accel * dt > 1e-9) actual.accel += cfg.accel_noise * n_accel;

    truth = bicycle_step(truth, actual, dt, cfg.truth_coeffs);
    msf = ekf_predict(msf, cmd, dt, nominal, q);

    if (cfg.keep_log) res.rows.push_back(row);
  }

  res.alarmed = det.alarmed;
  res.alarm_time = det.alarm_time;
  if (cfg.attack.enabled && det.alarm_time) res.detection_latency = *det.alarm_time - cfg.attack.start_time;
  res.final_speed = truth.speed;
  res.final_lateral_dev = true_dev(truth);
  res.max_true_lateral_dev = std::max(res.max_true_lateral_dev, std::abs(res.final_lateral_dev));
  res.ld3_score = sustained.value();
  return res;
}

}  // namespace ld3
