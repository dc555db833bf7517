#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ld3/defense/roc.hpp"
#include "ld3/harness/scenario.hpp"

namespace ld3 {

struct AttackGrid {
  std::vector<double> d;
  std::vector<double> f;
};

/// Parses "d=0.5,1,2,f=1.25,1.5,2" (a token with '=' starts a new key).
/// Throws ConfigError.
AttackGrid parse_grid(std::string_view text);

/// Run-level outcome without the per-step log.
struct RunRecord {
  std::string label;  // "benign" or "attack"
  double d{};
  double f{};
  std::uint64_t seed{};
  bool alarmed{};
  std::optional<double> alarm_time;
  std::optional<double> latency;
  double max_true_dev{};
  double final_speed{};
  double final_dev{};
  double ld3_score{};
};

RunRecord summarize(const std::string& label, const ScenarioConfig& cfg, const RunResult& r);

struct GridAggregate {
  double d{};
  double f{};
  std::size_t runs{};
  double tpr{};
  std::optional<double> mean_latency;
  std::optional<double> max_latency;
  double max_true_dev{};
  double max_abs_final_dev_alarmed{};  // over alarmed runs
  bool all_alarmed_stopped{true};
};

struct SweepResult {
  std::vector<RunRecord> runs;  // sorted by (label, d, f, seed)
  std::vector<GridAggregate> grid;
  std::size_t benign_runs{};
  double fpr{};
  double tpr{};  // over every attacked run
  std::vector<RocPoint> roc;  // LD3 run-level score; empty without both classes
  std::optional<double> auc;
};

struct SweepJob {
  std::string label;
  ScenarioConfig cfg;
};

/// Jobs for run_sweep, validated and ordered by (label, d, f, seed).
std::vector<SweepJob> make_sweep_jobs(const ScenarioConfig& base, const AttackGrid& grid,
                                     int n_seeds, int n_benign);

/// Sorts the records and computes rates, per-grid statistics and the ROC.
SweepResult aggregate_runs(std::vector<RunRecord> runs);

/// Attacked runs for every (d, f) x seed and `n_benign` benign runs. Seeds
/// are base.seed + i, so benign run i and attacked run i share noise
/// streams. Runs execute on `threads` workers (0 = hardware concurrency);
/// results do not depend on it.
SweepResult run_sweep(const ScenarioConfig& base, const AttackGrid& grid, int n_seeds, int n_benign,
                      unsigned threads = 0);

/// Constant spoofing offset (f = 1) of `fraction` x dev_threshold.
SweepResult run_stealthy_sweep(const ScenarioConfig& base, double fraction, int n_seeds,
                               unsigned threads = 0);

// Metrics CSVs. Byte-identical for identical inputs.
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_summary_csv(std::ostream& out, const SweepResult& sweep);
void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& roc);

/// Inverses of the writers above. Throw ParseError with the line number.
std::vector<RunRecord> read_runs_csv(std::istream& in);
std::vector<RocPoint> read_roc_csv(std::istream& in);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace ld3
