#include "ld3/harness/savior_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>

#include "ld3/defense/savior.hpp"
#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

namespace {

Matrix4 process_noise(const MsfConfig& m) {
  Matrix4 q = Matrix4::Zero();
  q.diagonal() << m.q_pos, m.q_pos, m.q_heading, m.q_speed;
  return q;
}

Matrix4 initial_cov(const MsfConfig& m) {
  Matrix4 p = Matrix4::Zero();
  p.diagonal() << m.init_pos_sigma * m.init_pos_sigma, m.init_pos_sigma * m.init_pos_sigma,
      m.init_heading_sigma * m.init_heading_sigma, m.init_speed_sigma * m.init_speed_sigma;
  return p;
}

// Prior residual at each GPS epoch of the log, with the filter propagated
// by the logged commands.
template <class OnResidual>
void replay(const std::vector<TraceRow>& rows, const ScenarioConfig& sc, const BicycleCoeffs& coeffs,
            OnResidual&& on_residual) {
  const double dt = 1.0 / sc.rates.control;
  const Matrix4 q = process_noise(sc.msf);
  MsfState ekf = make_msf_state(sc.initial, initial_cov(sc.msf));
  for (const TraceRow& r : rows) {
    if (r.gps_valid) {
      Measurement gps;
      gps.kind = SensorKind::kGps;
      gps.position = r.gps;
      gps.uncertainty = Matrix2::Identity() * r.gps_var;
      gps.timestamp = r.t;
      on_residual(r.t, savior_residual(ekf, gps));
      ekf = ekf_update(ekf, gps);
    }
    ekf = ekf_predict(ekf, ControlCmd{r.steering, r.accel}, dt, coeffs, q);
  }
}

}  // namespace

SaviorCalibration calibrate_savior(const ScenarioConfig& base, const SaviorConfig& cfg) {
  ScenarioConfig c = base;
  c.attack.enabled = false;
  c.seed = base.seed + cfg.calibration_seed_offset;
  c.duration = cfg.calibration_duration;
  c.keep_log = true;
  const RunResult run = run_scenario(c);

  std::vector<TraceSample> trace;
  trace.reserve(run.rows.size());
  const double dt = 1.0 / c.rates.control;
  for (const auto& r : run.rows) trace.push_back({r.truth, {r.steering, r.accel}, dt});

  SaviorCalibration cal;
  cal.coeffs = fit_bicycle_coeffs(trace, c.truth_coeffs.wheelbase);
  std::vector<double> res;
  replay(run.rows, c, cal.coeffs, [&](double, double r) { res.push_back(r); });
  if (res.size() < 2) throw DegenerateTrace("calibration run has too few GPS epochs");
  cal.expected = std::accumulate(res.begin(), res.end(), 0.0) / static_cast<double>(res.size());
  double ss = 0.0;
  for (double r : res) ss += (r - cal.expected) * (r - cal.expected);
  cal.sigma = std::sqrt(ss / static_cast<double>(res.size() - 1));
  cal.drift = cfg.drift_sigmas * cal.sigma;
  cal.threshold = cfg.threshold_sigmas * cal.sigma;
  return cal;
}

SaviorRun savior_monitor(const std::vector<TraceRow>& rows, const ScenarioConfig& scenario,
                         const SaviorCalibration& cal) {
  SaviorRun out;
  CusumState cs;
  cs.drift = cal.drift;
  cs.threshold = cal.threshold;
  replay(rows, scenario, cal.coeffs, [&](double t, double r) {
    out.residuals.push_back(r);
    cs = cusum_step(cs, r, cal.expected);
    out.score = std::max(out.score, cs.statistic());
    if (cs.alarmed && !out.alarmed) {
      out.alarmed = true;
      out.alarm_time = t;
    }
  });
  return out;
}

SaviorComparison run_savior_baseline(const ScenarioConfig& base, const AttackGrid& grid, int n_seeds,
                                     int n_benign, const SaviorConfig& cfg, unsigned threads) {
  if (n_seeds <= 0 || n_benign <= 0)
    throw OneClassOnly("SAVIOR ROC needs both benign and attacked runs");
  std::vector<SweepJob> jobs = make_sweep_jobs(base, grid, n_seeds, n_benign);
  SaviorComparison out;
  out.calibration = calibrate_savior(base, cfg);
  const SemanticMap map = build_map(base.map);

  std::vector<RunRecord> records(jobs.size());
  std::vector<SaviorRun> sav(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    ScenarioConfig c = jobs[i].cfg;
    c.keep_log = true;
    const RunResult r = run_scenario(c, map);
    records[i] = summarize(jobs[i].label, c, r);
    sav[i] = savior_monitor(r.rows, c, out.calibration);
    sav[i].residuals.clear();
  });
  out.ld3 = aggregate_runs(std::move(records));

  std::unique_ptr<bool[]> attacked(new bool[jobs.size()]);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const bool atk = jobs[i].label != "benign";
    attacked[i] = atk;
    out.savior_scores.push_back(sav[i].score);
    out.savior_alarms.push_back(sav[i].alarmed);
    std::optional<double> lat;
    if (atk && sav[i].alarm_time) lat = *sav[i].alarm_time - jobs[i].cfg.attack.start_time;
    out.savior_latency.push_back(lat);
  }
  out.savior_roc =
      roc_points(out.savior_scores, std::span<const bool>(attacked.get(), jobs.size()));
  out.savior_auc = roc_auc(out.savior_roc);
  out.savior_tpr_at_zero_fpr = tpr_at_zero_fpr(out.savior_roc);
  out.ld3_tpr_at_zero_fpr = tpr_at_zero_fpr(out.ld3.roc);
  return out;
}

void write_savior_csv(std::ostream& out, const SaviorComparison& c) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : ""; };
  out << "label,d,f,seed,ld3_score,ld3_alarmed,ld3_latency,savior_score,savior_alarmed,"
         "savior_latency\n";
  for (std::size_t i = 0; i < c.ld3.runs.size(); ++i) {
    const RunRecord& r = c.ld3.runs[i];
    out << r.label << ',' << detail::format_double(r.d) << ',' << detail::format_double(r.f) << ','
        << r.seed << ',' << detail::format_double(r.ld3_score) << ',' << (r.alarmed ? 1 : 0) << ','
        << opt(r.latency) << ',' << detail::format_double(c.savior_scores[i]) << ','
        << (c.savior_alarms[i] ? 1 : 0) << ',' << opt(c.savior_latency[i]) << '\n';
  }
}

}  // namespace ld3
