#pragma once

#include <optional>
#include <vector>

#include "ld3/defense/roc.hpp"
#include "ld3/harness/scenario.hpp"
#include "ld3/harness/sweep.hpp"

namespace ld3 {

struct SaviorConfig {
  std::uint64_t calibration_seed_offset{1000003};  // calibration run is disjoint from the test seeds
  double calibration_duration{60.0};
  double drift_sigmas{1.0};      // CUSUM drift in residual standard deviations
  double threshold_sigmas{10.0};  // CUSUM alarm threshold in residual standard deviations
};

struct SaviorCalibration {
  BicycleCoeffs coeffs;
  double expected{};  // mean benign residual
  double sigma{};     // residual standard deviation
  double drift{};
  double threshold{};
};

/// Residual-CUSUM result over one logged run.
struct SaviorRun {
  double score{};  // max over the run of max(s_pos, s_neg)
  bool alarmed{};
  std::optional<double> alarm_time;
  std::vector<double> residuals;
};

/// Fits the bicycle coefficients on a benign run and sets the CUSUM
/// parameters from its residuals. Throws DegenerateTrace.
SaviorCalibration calibrate_savior(const ScenarioConfig& base, const SaviorConfig& cfg = {});

/// Replays a logged run through the EKF (commands only plus GPS) and the
/// CUSUM detector. `rows` must come from a run of `scenario`.
SaviorRun savior_monitor(const std::vector<TraceRow>& rows, const ScenarioConfig& scenario,
                         const SaviorCalibration& cal);

struct SaviorComparison {
  SaviorCalibration calibration;
  SweepResult ld3;                // same runs scored by LD3
  std::vector<double> savior_scores;  // aligned with ld3.runs
  std::vector<char> savior_alarms;
  std::vector<std::optional<double>> savior_latency;
  std::vector<RocPoint> savior_roc;
  double savior_auc{};
  double savior_tpr_at_zero_fpr{};
  double ld3_tpr_at_zero_fpr{};
};

/// Runs the LD3 sweep and scores the same runs with SAVIOR. Throws
/// OneClassOnly when the set lacks benign or attacked runs.
SaviorComparison run_savior_baseline(const ScenarioConfig& base, const AttackGrid& grid, int n_seeds,
                                     int n_benign, const SaviorConfig& cfg = {},
                                     unsigned threads = 0);

void write_savior_csv(std::ostream& out, const SaviorComparison& c);

}  // namespace ld3
