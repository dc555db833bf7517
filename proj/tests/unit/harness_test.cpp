#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ld3/errors.hpp"
#include "ld3/harness/config.hpp"
#include "ld3/harness/plots.hpp"
#include "ld3/harness/savior_baseline.hpp"
#include "ld3/harness/sweep.hpp"
#include "ld3/harness/trace_io.hpp"

namespace ld3 {
namespace {

namespace fs = std::filesystem;

ScenarioConfig attacked(double d = 2.0, double f = 2.0) {
  ScenarioConfig c;
  c.attack.enabled = true;
  c.attack.d = d;
  c.attack.f = f;
  return c;
}

std::string serialize(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  write_trace(out, rows);
  return out.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ld3_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Scenario, BenignSixtySeconds) {
  ScenarioConfig c;
  c.duration = 60;
  const RunResult r = run_scenario(c);
  EXPECT_FALSE(r.alarmed);
  EXPECT_LT(r.max_true_lateral_dev, 0.3);
  EXPECT_GT(r.final_speed, 14.0);
}

TEST(Scenario, DisabledDetectorLetsVehicleLeaveLane) {
  ScenarioConfig c = attacked();
  c.detector.dev_threshold = std::numeric_limits<double>::infinity();
  const RunResult r = run_scenario(c);
  EXPECT_FALSE(r.alarmed);
  EXPECT_GT(r.max_true_lateral_dev, 1.75);
}

TEST(Scenario, EnabledDetectorStopsInLane) {
  const RunResult r = run_scenario(attacked());
  EXPECT_TRUE(r.alarmed);
  EXPECT_EQ(r.final_speed, 0.0);
  EXPECT_LE(std::abs(r.final_lateral_dev), 0.9);
}

TEST(Scenario, CurvedRoadStopsInLane) {
  for (auto dir : {AttackDirection::kLeft, AttackDirection::kRight}) {
    ScenarioConfig c = attacked(1.0, 1.5);
    c.map.kind = MapSpec::Kind::kCurved;
    c.map.length = 150;
    c.attack.direction = dir;
    c.attack.start_time = 15;
    c.duration = 50;
    const RunResult r = run_scenario(c);
    EXPECT_TRUE(r.alarmed);
    EXPECT_EQ(r.final_speed, 0.0);
    EXPECT_LE(std::abs(r.final_lateral_dev), 0.85);
  }
}

TEST(Scenario, Deterministic) {
  const ScenarioConfig c = attacked(1.0, 1.5);
  EXPECT_EQ(serialize(run_scenario(c).rows), serialize(run_scenario(c).rows));
  ScenarioConfig other = c;
  other.seed = 2;
  EXPECT_NE(serialize(run_scenario(c).rows), serialize(run_scenario(other).rows));
}

TEST(Scenario, SensorRatesAreConsistent) {
  ScenarioConfig c;
  c.duration = 12.5;
  const RunResult r = run_scenario(c);
  std::size_t ld = 0, gps = 0, lidar = 0;
  for (const auto& row : r.rows) {
    ld += row.ld_valid;
    gps += row.gps_valid;
    lidar += row.lidar_valid;
  }
  EXPECT_NEAR(static_cast<double>(ld), c.duration * c.rates.ld, 1.0);
  EXPECT_NEAR(static_cast<double>(gps), c.duration * c.rates.gps, 1.0);
  EXPECT_NEAR(static_cast<double>(lidar), c.duration * c.rates.lidar, 1.0);
  EXPECT_EQ(ld, r.ld_samples);
  EXPECT_EQ(r.rows.size(), static_cast<std::size_t>(c.duration * c.rates.control));
}

TEST(Scenario, CausalityAndControlProvenance) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig c = attacked(0.5, 1.25);
    c.seed = seed;
    const RunResult r = run_scenario(c);
    ASSERT_TRUE(r.alarm_time);
    EXPECT_GE(*r.alarm_time, c.attack.start_time);
    EXPECT_GE(*r.detection_latency, 0.0);
    for (const auto& row : r.rows) {
      EXPECT_EQ(row.source == ControlSource::kLd, row.alarmed) << row.t;
      EXPECT_EQ(row.spoofed, row.gps_valid && row.t >= c.attack.start_time);
    }
  }
}

TEST(Scenario, PostAlarmControlIgnoresMsf) {
  // Two runs that differ only in the spoofer's saturation level. The cap is
  // first reached seconds after the alarm, so everything up to the alarm is
  // identical and afterwards only the MSF belief differs. Commands must not.
  ScenarioConfig a = attacked(0.5, 1.25);
  a.attack.max_offset = 1000.0;
  ScenarioConfig b = a;
  b.attack.max_offset = std::numeric_limits<double>::infinity();
  const RunResult ra = run_scenario(a);
  const RunResult rb = run_scenario(b);
  ASSERT_TRUE(ra.alarm_time);
  ASSERT_EQ(ra.alarm_time, rb.alarm_time);
  std::size_t msf_differs = 0;
  for (std::size_t i = 0; i < ra.rows.size(); ++i) {
    const TraceRow& x = ra.rows[i];
    const TraceRow& y = rb.rows[i];
    if (!x.alarmed) {
      ASSERT_EQ(x.msf, y.msf) << "pre-alarm divergence at " << x.t;
      continue;
    }
    msf_differs += x.msf.y != y.msf.y;
    EXPECT_EQ(x.source, ControlSource::kLd);
    EXPECT_EQ(x.steering, y.steering) << x.t;
    EXPECT_EQ(x.accel, y.accel) << x.t;
    EXPECT_EQ(x.truth, y.truth) << x.t;
  }
  EXPECT_GT(msf_differs, 100u);
}

TEST(Scenario, MsfLateralErrorGrowsUnderSpoofing) {
  ScenarioConfig c = attacked();
  c.detector.dev_threshold = std::numeric_limits<double>::infinity();
  c.attack.max_offset = 1e9;
  const RunResult r = run_scenario(c);
  std::vector<double> err;  // MSF minus true lateral position at GPS epochs after the attack starts
  for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) {
    const TraceRow& row = r.rows[i];
    if (!row.spoofed) continue;
    err.push_back(r.rows[i + 1].msf.y - r.rows[i + 1].truth.y);
    if (err.size() == 12) break;
  }
  ASSERT_EQ(err.size(), 12u);
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GT(err[k], err[k - 1]) << k;
}

TEST(Scenario, ZeroNoiseNeverAlarms) {
  for (auto kind : {MapSpec::Kind::kStraight, MapSpec::Kind::kCurved}) {
    ScenarioConfig c;
    c.map.kind = kind;
    if (kind == MapSpec::Kind::kCurved) c.map.length = 100;  // lead-in before the arc
    c.duration = 30;
    c.gps.sigma = 0;
    c.lidar.sigma = 0;
    c.lidar.inflate_prob = 0;
    c.ld.lateral_sigma = 0;
    c.ld.heading_sigma = 0;
    c.ld.dropout_prob = 0;
    c.ld.wrong_line_prob = 0;
    c.steer_noise = 0;
    c.accel_noise = 0;
    c.msf.init_pos_sigma = 0;
    c.msf.init_heading_sigma = 0;
    c.msf.init_speed_sigma = 0;
    c.detector.dev_threshold = 1e-6;
    c.detector.confirm_window = 1;
    const RunResult r = run_scenario(c);
    EXPECT_FALSE(r.alarmed);
    EXPECT_LT(r.max_disagreement, 1e-6);
  }
}

TEST(Scenario, LargerOffsetsAlarmNoLater) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double prev = std::numeric_limits<double>::infinity();
    for (double d : {0.5, 1.0, 2.0}) {
      ScenarioConfig c = attacked(d, 1.5);
      c.seed = seed;
      const RunResult r = run_scenario(c);
      ASSERT_TRUE(r.alarm_time);
      EXPECT_LE(*r.alarm_time, prev) << "seed " << seed << " d " << d;
      prev = *r.alarm_time;
    }
  }
}

TEST(Scenario, InvalidConfigs) {
  ScenarioConfig c = attacked();
  c.attack.start_time = c.duration;
  EXPECT_THROW(run_scenario(c), ConfigError);
  c = ScenarioConfig{};
  c.rates.ld = 30;  // does not divide 100 Hz
  EXPECT_THROW(validate(c), ConfigError);
  c = ScenarioConfig{};
  c.duration = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = attacked();
  c.attack.f = 0.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = ScenarioConfig{};
  c.map.kind = MapSpec::Kind::kFile;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, ParsesSectionsAndEchoRoundTrips) {
  std::istringstream in(
      "[scenario]\nname = demo\nduration = 25\nseed = 9\n"
      "[map]\nkind = curved\ncurve_radius = 300\n"
      "[attack]\nenabled = true\nd = 1.5\nf = 1.25\ndirection = right\n"
      "[detector]\ndev_threshold = inf\nconfirm_window = 4\n");
  const ScenarioConfig c = parse_config(in);
  EXPECT_EQ(c.name, "demo");
  EXPECT_EQ(c.duration, 25.0);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.map.kind, MapSpec::Kind::kCurved);
  EXPECT_EQ(c.map.curve_radius, 300.0);
  EXPECT_TRUE(c.attack.enabled);
  EXPECT_EQ(c.attack.direction, AttackDirection::kRight);
  EXPECT_TRUE(std::isinf(c.detector.dev_threshold));
  EXPECT_EQ(c.detector.confirm_window, 4);
  const std::string echo = config_to_string(c);
  std::istringstream again(echo);
  EXPECT_EQ(config_to_string(parse_config(again)), echo);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  std::istringstream typo("[detector]\ndev_treshold = 0.4\n");
  EXPECT_THROW(parse_config(typo), ConfigError);
  std::istringstream section("[detectr]\ndev_threshold = 0.4\n");
  EXPECT_THROW(parse_config(section), ConfigError);
  std::istringstream number("[scenario]\nduration = long\n");
  EXPECT_THROW(parse_config(number), ConfigError);
  std::istringstream kind("[map]\nkind = spiral\n");
  EXPECT_THROW(parse_config(kind), ConfigError);
  std::istringstream top("duration = 3\n");
  EXPECT_THROW(parse_config(top), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/ld3.ini"), ConfigError);
}

TEST(Config, RelativeMapFileResolvesAgainstConfigDir) {
  const fs::path dir = scratch("config");
  save_map(dir / "road.map", build_straight_map(300, 3.6));
  std::ofstream(dir / "scenario.ini") << "[map]\nkind = file\nfile = road.map\n";
  const ScenarioConfig c = load_config(dir / "scenario.ini");
  EXPECT_EQ(c.map.file, dir / "road.map");
  EXPECT_DOUBLE_EQ(build_map(c.map).lanes()[0].width, 3.6);
}

TEST(TraceIo, RoundTripIsExact) {
  ScenarioConfig c = attacked();
  c.duration = 15;
  const auto rows = run_scenario(c).rows;
  const std::string text = serialize(rows);
  std::istringstream in(text);
  const auto back = read_trace(in);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(serialize(back), text);
  for (std::size_t i = 0; i < rows.size(); i += 97) {
    EXPECT_EQ(back[i].truth, rows[i].truth);
    EXPECT_EQ(back[i].alarmed, rows[i].alarmed);
    EXPECT_EQ(back[i].source, rows[i].source);
  }
}

TEST(TraceIo, TruncatedRowNamesLine) {
  ScenarioConfig c;
  c.duration = 0.05;
  std::string text = serialize(run_scenario(c).rows);
  const auto cut = text.rfind(',');
  text = text.substr(0, cut) + "\n";
  std::istringstream in(text);
  try {
    read_trace(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
  }
}

TEST(TraceIo, ReorderedHeaderRejected) {
  std::string header;
  for (auto col : trace_columns()) header += std::string(col) + ",";
  header.pop_back();
  const auto comma = header.find(',');
  const std::string swapped =
      header.substr(comma + 1, header.find(',', comma + 1) - comma - 1) + "," +
      header.substr(0, comma) + header.substr(header.find(',', comma + 1));
  std::istringstream in(swapped + "\n");
  try {
    read_trace(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(Sweep, ParseGrid) {
  const AttackGrid g = parse_grid("d=0.5,1,2,f=1.25,1.5,2");
  EXPECT_EQ(g.d, (std::vector<double>{0.5, 1, 2}));
  EXPECT_EQ(g.f, (std::vector<double>{1.25, 1.5, 2}));
  EXPECT_THROW(parse_grid("d=1"), ConfigError);
  EXPECT_THROW(parse_grid("x=1,f=2"), ConfigError);
  EXPECT_THROW(parse_grid("d=1,,f=2"), ConfigError);
  EXPECT_THROW(parse_grid("1,2"), ConfigError);
}

TEST(Sweep, AggressiveGridPerfectRates) {
  const SweepResult s = run_sweep(ScenarioConfig{}, {{2.0}, {2.0}}, 10, 10, 1);
  EXPECT_EQ(s.tpr, 1.0);
  EXPECT_EQ(s.fpr, 0.0);
  ASSERT_EQ(s.grid.size(), 1u);
  EXPECT_EQ(s.grid[0].runs, 10u);
  EXPECT_TRUE(s.grid[0].mean_latency);
  ASSERT_TRUE(s.auc);
  EXPECT_EQ(*s.auc, 1.0);
}

TEST(Sweep, DisabledDetectorDetectsNothing) {
  ScenarioConfig c;
  c.detector.dev_threshold = std::numeric_limits<double>::infinity();
  const SweepResult s = run_sweep(c, {{2.0}, {2.0}}, 3, 0, 1);
  EXPECT_EQ(s.tpr, 0.0);
  EXPECT_TRUE(s.roc.empty());
}

TEST(Sweep, StealthyOffsetStaysBounded) {
  ScenarioConfig c;
  const SweepResult s = run_stealthy_sweep(c, 0.9, 5, 1);
  EXPECT_EQ(s.tpr, 0.0);
  for (const auto& r : s.runs) EXPECT_LE(r.max_true_dev, c.detector.dev_threshold + 0.3);
}

TEST(Sweep, OutputIndependentOfThreadCount) {
  const AttackGrid g{{0.5, 2.0}, {1.5}};
  const SweepResult a = run_sweep(ScenarioConfig{}, g, 3, 3, 1);
  const SweepResult b = run_sweep(ScenarioConfig{}, g, 3, 3, 4);
  std::ostringstream ra, rb, sa, sb;
  write_runs_csv(ra, a.runs);
  write_runs_csv(rb, b.runs);
  write_summary_csv(sa, a);
  write_summary_csv(sb, b);
  EXPECT_EQ(ra.str(), rb.str());
  EXPECT_EQ(sa.str(), sb.str());
  for (std::size_t i = 1; i < a.runs.size(); ++i) {
    const auto& p = a.runs[i - 1];
    const auto& q = a.runs[i];
    EXPECT_TRUE(std::tie(p.label, p.d, p.f, p.seed) < std::tie(q.label, q.d, q.f, q.seed));
  }
}

TEST(Sweep, CsvReadersInvertWriters) {
  const SweepResult s = run_sweep(ScenarioConfig{}, {{1.0}, {2.0}}, 2, 2, 1);
  std::stringstream runs, roc;
  write_runs_csv(runs, s.runs);
  write_roc_csv(roc, s.roc);
  const std::string runs_text = runs.str(), roc_text = roc.str();
  const auto back_runs = read_runs_csv(runs);
  const auto back_roc = read_roc_csv(roc);
  std::ostringstream runs2, roc2;
  write_runs_csv(runs2, back_runs);
  write_roc_csv(roc2, back_roc);
  EXPECT_EQ(runs2.str(), runs_text);
  EXPECT_EQ(roc2.str(), roc_text);
  std::istringstream bad("fpr,tpr,threshold\n0,0\n");
  EXPECT_THROW(read_roc_csv(bad), ParseError);
}

TEST(Savior, BenignOnlyIsOneClass) {
  EXPECT_THROW(run_savior_baseline(ScenarioConfig{}, {{2.0}, {2.0}}, 0, 4, {}, 1), OneClassOnly);
}

TEST(Savior, CalibrationFitsNominalModel) {
  const SaviorCalibration cal = calibrate_savior(ScenarioConfig{});
  EXPECT_NEAR(cal.coeffs.c1, 1.0, 1e-3);
  EXPECT_NEAR(cal.coeffs.c2, 1.0, 0.05);
  EXPECT_GT(cal.sigma, 0.0);
  EXPECT_GT(cal.expected, 0.0);
  EXPECT_DOUBLE_EQ(cal.threshold, 10 * cal.drift);
}

TEST(Savior, TinyThresholdFlagsEverything) {
  SaviorConfig cfg;
  cfg.threshold_sigmas = 1e-12;
  const SaviorComparison c = run_savior_baseline(ScenarioConfig{}, {{2.0}, {2.0}}, 3, 3, cfg, 1);
  for (char a : c.savior_alarms) EXPECT_TRUE(a);
}

TEST(Savior, EmitsRocOverSameRuns) {
  const SaviorComparison c = run_savior_baseline(ScenarioConfig{}, {{2.0}, {2.0}}, 4, 4, {}, 1);
  EXPECT_EQ(c.savior_scores.size(), c.ld3.runs.size());
  EXPECT_EQ(c.savior_roc.front().fpr, 0.0);
  EXPECT_EQ(c.savior_roc.back().tpr, 1.0);
  EXPECT_GE(c.savior_auc, 0.0);
  EXPECT_LE(c.savior_auc, 1.0);
}

TEST(Plots, PerfectRocAndDeviationRules) {
  const fs::path dir = scratch("plots");
  PlotInputs in;
  in.roc.push_back({"perfect", {{0, 0, INFINITY}, {0, 1, 0.5}, {1, 1, 0.1}}});
  ScenarioConfig c = attacked();
  c.duration = 15;
  in.trace = run_scenario(c).rows;
  in.attack_start = c.attack.start_time;
  in.latencies = {0.5, 0.6, 0.55};
  const PlotFiles files = emit_plots(in, dir);
  EXPECT_EQ(files.svg.size(), 3u);
  std::ifstream roc(dir / "roc.csv");
  std::string text((std::istreambuf_iterator<char>(roc)), {});
  EXPECT_NE(text.find("perfect,0,0,inf"), std::string::npos);
  EXPECT_NE(text.find("perfect,0,1,"), std::string::npos);
  EXPECT_NE(text.find("perfect,1,1,"), std::string::npos);
  std::ifstream dev(dir / "deviation.svg");
  std::string svg((std::istreambuf_iterator<char>(dev)), {});
  EXPECT_NE(svg.find("class=\"attack-start\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"alarm\""), std::string::npos);
  EXPECT_EQ(histogram({0.51, 0.56, 0.61, 0.9, -1.0}, 0.5, 0.05, 3),
            (std::vector<std::size_t>{1, 1, 1}));
}

TEST(Plots, EmptyInputsRefused) {
  try {
    emit_plots({}, scratch("plots_empty"));
    FAIL();
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("ROC"), std::string::npos);
    EXPECT_NE(msg.find("trace"), std::string::npos);
  }
}

}  // namespace
}  // namespace ld3
