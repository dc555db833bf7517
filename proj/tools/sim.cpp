// Scenario simulator: single runs, attack sweeps, the SAVIOR comparison and
// plot rendering.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"
#include "ld3/harness/config.hpp"
#include "ld3/harness/plots.hpp"
#include "ld3/harness/savior_baseline.hpp"
#include "ld3/harness/sweep.hpp"
#include "ld3/harness/trace_io.hpp"

namespace fs = std::filesystem;
using namespace ld3;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

// Safe-stop acceptance bound for a 1.8 m vehicle in a 3.5 m lane plus slack.
constexpr double kStopDevBound = 0.85 + 0.05;

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

void prepare_dir(const fs::path& dir, const ScenarioConfig& cfg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  open_out(dir / "config.ini") << config_to_string(cfg);
}

std::string opt(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string("none");
}

// One attacked run with its full log, for the deviation plot.
void write_example_trace(const fs::path& out, ScenarioConfig cfg, const AttackGrid& grid) {
  cfg.attack.enabled = true;
  cfg.attack.d = grid.d.front();
  cfg.attack.f = grid.f.front();
  cfg.keep_log = true;
  write_trace(out / "trace.csv", run_scenario(cfg).rows);
}

int cmd_run(const fs::path& config, const fs::path& out, bool check) {
  const ScenarioConfig cfg = load_config(config);
  const RunResult r = run_scenario(cfg);
  if (!out.empty()) {
    prepare_dir(out, cfg);
    write_trace(out / "trace.csv", r.rows);
    std::vector<RunRecord> one{summarize(cfg.attack.enabled ? "attack" : "benign", cfg, r)};
    auto f = open_out(out / "runs.csv");
    write_runs_csv(f, one);
  }
  std::cout << "scenario " << cfg.name << " seed " << cfg.seed << "\n"
            << "alarmed " << (r.alarmed ? "yes" : "no") << " alarm_time " << opt(r.alarm_time)
            << " latency " << opt(r.detection_latency) << "\n"
            << "max_true_lateral_dev " << detail::format_double(r.max_true_lateral_dev)
            << " final_speed " << detail::format_double(r.final_speed) << " final_lateral_dev "
            << detail::format_double(r.final_lateral_dev) << "\n";
  if (!check) return 0;
  bool ok = true;
  if (cfg.attack.enabled) {
    ok = r.alarmed && r.final_speed == 0.0 && std::abs(r.final_lateral_dev) <= kStopDevBound;
  } else {
    ok = !r.alarmed;
  }
  std::cout << "check " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : kExitCheck;
}

int cmd_sweep(const fs::path& config, const std::string& grid_text, int seeds, int benign,
              unsigned threads, const fs::path& out, bool check) {
  const ScenarioConfig cfg = load_config(config);
  const AttackGrid grid = parse_grid(grid_text);
  if (benign < 0) benign = seeds;
  const SweepResult s = run_sweep(cfg, grid, seeds, benign, threads);
  if (!out.empty()) {
    prepare_dir(out, cfg);
    {
      auto f = open_out(out / "runs.csv");
      write_runs_csv(f, s.runs);
    }
    {
      auto f = open_out(out / "summary.csv");
      write_summary_csv(f, s);
    }
    if (!s.roc.empty()) {
      auto f = open_out(out / "roc.csv");
      write_roc_csv(f, s.roc);
    }
    if (seeds > 0) write_example_trace(out, cfg, grid);
  }
  std::cout << "runs " << s.runs.size() << " benign " << s.benign_runs << "\n"
            << "TPR " << detail::format_double(s.tpr) << " FPR " << detail::format_double(s.fpr)
            << "\n";
  if (s.auc) std::cout << "AUC " << detail::format_double(*s.auc) << "\n";
  for (const auto& g : s.grid)
    std::cout << "d=" << detail::format_double(g.d) << " f=" << detail::format_double(g.f)
              << " tpr " << detail::format_double(g.tpr) << " mean_latency "
              << opt(g.mean_latency) << " max_true_dev " << detail::format_double(g.max_true_dev)
              << "\n";
  if (!check) return 0;
  bool ok = s.fpr == 0.0 && s.tpr == 1.0;
  for (const auto& g : s.grid)
    ok = ok && g.all_alarmed_stopped && g.max_abs_final_dev_alarmed <= kStopDevBound;
  std::cout << "check " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : kExitCheck;
}

int cmd_savior(const fs::path& config, const std::string& grid_text, int seeds, int benign,
               unsigned threads, const fs::path& out) {
  const ScenarioConfig cfg = load_config(config);
  const SaviorComparison c =
      run_savior_baseline(cfg, parse_grid(grid_text), seeds, benign, SaviorConfig{}, threads);
  if (!out.empty()) {
    prepare_dir(out, cfg);
    {
      auto f = open_out(out / "savior.csv");
      write_savior_csv(f, c);
    }
    {
      auto f = open_out(out / "savior_roc.csv");
      write_roc_csv(f, c.savior_roc);
    }
    {
      auto f = open_out(out / "roc.csv");
      write_roc_csv(f, c.ld3.roc);
    }
    {
      auto f = open_out(out / "runs.csv");
      write_runs_csv(f, c.ld3.runs);
    }
    write_example_trace(out, cfg, parse_grid(grid_text));
  }
  const auto& k = c.calibration.coeffs;
  std::cout << "fitted c1..c4 " << k.c1 << ' ' << k.c2 << ' ' << k.c3 << ' ' << k.c4 << "\n"
            << "residual mean " << c.calibration.expected << " sigma " << c.calibration.sigma
            << "\n"
            << "SAVIOR AUC " << detail::format_double(c.savior_auc) << " TPR@FPR0 "
            << detail::format_double(c.savior_tpr_at_zero_fpr) << "\n"
            << "LD3 AUC " << opt(c.ld3.auc) << " TPR@FPR0 "
            << detail::format_double(c.ld3_tpr_at_zero_fpr) << "\n";
  return 0;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot read " + p.string());
  return f;
}

int cmd_plot(const fs::path& dir, fs::path out) {
  if (out.empty()) out = dir / "plots";
  PlotInputs in;
  if (fs::exists(dir / "roc.csv")) {
    auto f = open_in(dir / "roc.csv");
    in.roc.push_back({"LD3", read_roc_csv(f)});
  }
  if (fs::exists(dir / "savior_roc.csv")) {
    auto f = open_in(dir / "savior_roc.csv");
    in.roc.push_back({"SAVIOR", read_roc_csv(f)});
  }
  if (fs::exists(dir / "trace.csv")) in.trace = read_trace(dir / "trace.csv");
  if (fs::exists(dir / "runs.csv")) {
    auto f = open_in(dir / "runs.csv");
    for (const auto& r : read_runs_csv(f))
      if (r.latency) in.latencies.push_back(*r.latency);
  }
  if (fs::exists(dir / "config.ini")) in.attack_start = load_config(dir / "config.ini").attack.start_time;
  const PlotFiles files = emit_plots(in, out);
  for (const auto& p : files.svg) std::cout << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop GPS-spoofing defense simulator"};
  app.require_subcommand(1);

  fs::path config, out, results;
  bool check = false;
  std::string grid = "d=2,f=2";
  int seeds = 10;
  int benign = -1;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("config", config, "scenario file")->required();
  run->add_option("--out", out, "output directory for config echo and trace");
  run->add_flag("--check", check, "exit 3 unless the run meets the safety checks");

  auto* sweep = app.add_subcommand("sweep", "attack grid x seeds plus benign runs");
  sweep->add_option("config", config, "scenario file")->required();
  sweep->add_option("--grid", grid, "attack grid, e.g. d=0.5,1,2,f=1.25,1.5,2");
  sweep->add_option("--seeds", seeds, "seeds per grid point")->check(CLI::NonNegativeNumber);
  sweep->add_option("--benign", benign, "benign runs (default: --seeds)");
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
  sweep->add_option("--out", out, "output directory");
  sweep->add_flag("--check", check, "exit 3 unless TPR = 1, FPR = 0 and every stop is in lane");

  auto* savior = app.add_subcommand("savior", "compare the SAVIOR baseline against LD3");
  savior->add_option("config", config, "scenario file")->required();
  savior->add_option("--grid", grid, "attack grid");
  savior->add_option("--seeds", seeds, "seeds per grid point")->check(CLI::NonNegativeNumber);
  savior->add_option("--benign", benign, "benign runs (default: --seeds)");
  savior->add_option("--threads", threads, "worker threads (0 = all cores)");
  savior->add_option("--out", out, "output directory");

  auto* plot = app.add_subcommand("plot", "render CSV and SVG plots from a results directory");
  plot->add_option("results", results, "directory written by run, sweep or savior")->required();
  plot->add_option("--out", out, "plot directory (default: <results>/plots)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out, check);
    if (*sweep) return cmd_sweep(config, grid, seeds, benign, threads, out, check);
    if (*savior) return cmd_savior(config, grid, seeds, benign < 0 ? seeds : benign, threads, out);
    if (*plot) return cmd_plot(results, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
