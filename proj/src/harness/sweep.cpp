#include "ld3/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

namespace {

constexpr std::string_view kRunsHeader =
    "label,d,f,seed,alarmed,alarm_time,latency,max_true_dev,final_speed,final_dev,ld3_score";
constexpr std::string_view kRocHeader = "fpr,tpr,threshold";

}  // namespace

AttackGrid parse_grid(std::string_view text) {
  AttackGrid g;
  std::vector<double>* cur = nullptr;
  for (auto tok : detail::split(text, ',')) {
    tok = detail::trim(tok);
    if (tok.empty()) throw ConfigError("empty value in grid");
    if (const auto eq = tok.find('='); eq != std::string_view::npos) {
      const auto key = detail::trim(tok.substr(0, eq));
      if (key == "d")
        cur = &g.d;
      else if (key == "f")
        cur = &g.f;
      else
        throw ConfigError("unknown grid key '" + std::string(key) + "'");
      if (!cur->empty()) throw ConfigError("grid key '" + std::string(key) + "' given twice");
      tok = detail::trim(tok.substr(eq + 1));
    }
    if (!cur) throw ConfigError("grid must start with d= or f=");
    const auto v = detail::parse_double(tok);
    if (!v) throw ConfigError("bad grid value '" + std::string(tok) + "'");
    cur->push_back(*v);
  }
  if (g.d.empty() || g.f.empty()) throw ConfigError("grid needs both d= and f= values");
  return g;
}

RunRecord summarize(const std::string& label, const ScenarioConfig& cfg, const RunResult& r) {
  RunRecord rec;
  rec.label = label;
  rec.d = cfg.attack.enabled ? cfg.attack.d : 0.0;
  rec.f = cfg.attack.enabled ? cfg.attack.f : 0.0;
  rec.seed = cfg.seed;
  rec.alarmed = r.alarmed;
  rec.alarm_time = r.alarm_time;
  rec.latency = r.detection_latency;
  rec.max_true_dev = r.max_true_lateral_dev;
  rec.final_speed = r.final_speed;
  rec.final_dev = r.final_lateral_dev;
  rec.ld3_score = r.ld3_score;
  return rec;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

bool record_less(const RunRecord& a, const RunRecord& b) {
  return std::tie(a.label, a.d, a.f, a.seed) < std::tie(b.label, b.d, b.f, b.seed);
}

}  // namespace

SweepResult aggregate_runs(std::vector<RunRecord> runs) {
  std::sort(runs.begin(), runs.end(), record_less);
  SweepResult out;
  std::size_t attacked = 0, attacked_alarms = 0, benign_alarms = 0;
  for (const auto& r : runs) {
    if (r.label == "benign") {
      ++out.benign_runs;
      benign_alarms += r.alarmed;
      continue;
    }
    ++attacked;
    attacked_alarms += r.alarmed;
    auto it = std::find_if(out.grid.begin(), out.grid.end(),
                           [&](const GridAggregate& g) { return g.d == r.d && g.f == r.f; });
    if (it == out.grid.end()) {
      out.grid.push_back({});
      it = std::prev(out.grid.end());
      it->d = r.d;
      it->f = r.f;
    }
    GridAggregate& g = *it;
    ++g.runs;
    g.tpr += r.alarmed;
    g.max_true_dev = std::max(g.max_true_dev, r.max_true_dev);
    if (r.alarmed) {
      g.max_abs_final_dev_alarmed = std::max(g.max_abs_final_dev_alarmed, std::abs(r.final_dev));
      g.all_alarmed_stopped = g.all_alarmed_stopped && r.final_speed == 0.0;
    }
    if (r.latency) {
      g.mean_latency = g.mean_latency.value_or(0.0) + *r.latency;
      g.max_latency = std::max(g.max_latency.value_or(0.0), *r.latency);
    }
  }
  for (auto& g : out.grid) {
    if (g.mean_latency && g.tpr > 0) g.mean_latency = *g.mean_latency / g.tpr;
    g.tpr /= static_cast<double>(g.runs);
  }
  out.fpr = out.benign_runs ? static_cast<double>(benign_alarms) / out.benign_runs : 0.0;
  out.tpr = attacked ? static_cast<double>(attacked_alarms) / attacked : 0.0;
  if (attacked && out.benign_runs) {
    std::vector<double> scores;
    std::unique_ptr<bool[]> attacked_flag(new bool[runs.size()]);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      scores.push_back(runs[i].ld3_score);
      attacked_flag[i] = runs[i].label != "benign";
    }
    out.roc = roc_points(scores, std::span<const bool>(attacked_flag.get(), runs.size()));
    out.auc = roc_auc(out.roc);
  }
  out.runs = std::move(runs);
  return out;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? detail::format_double(*v) : ""; }

}  // namespace

std::vector<SweepJob> make_sweep_jobs(const ScenarioConfig& base, const AttackGrid& grid,
                                     int n_seeds, int n_benign) {
  if (grid.d.empty() || grid.f.empty()) throw ConfigError("attack grid is empty");
  if (n_seeds < 0 || n_benign < 0) throw ConfigError("seed counts must be >= 0");
  std::vector<SweepJob> jobs;
  for (int i = 0; i < n_benign; ++i) {
    SweepJob j{"benign", base};
    j.cfg.attack.enabled = false;
    j.cfg.seed = base.seed + static_cast<std::uint64_t>(i);
    j.cfg.keep_log = false;
    jobs.push_back(std::move(j));
  }
  for (double d : grid.d) {
    for (double f : grid.f) {
      for (int s = 0; s < n_seeds; ++s) {
        SweepJob j{"attack", base};
        j.cfg.attack.enabled = true;
        j.cfg.attack.d = d;
        j.cfg.attack.f = f;
        j.cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        j.cfg.keep_log = false;
        jobs.push_back(std::move(j));
      }
    }
  }
  for (const auto& j : jobs) validate(j.cfg);
  auto key = [](const SweepJob& j) {
    const bool atk = j.cfg.attack.enabled;
    return std::make_tuple(j.label, atk ? j.cfg.attack.d : 0.0, atk ? j.cfg.attack.f : 0.0,
                           j.cfg.seed);
  };
  std::stable_sort(jobs.begin(), jobs.end(),
                   [&](const SweepJob& a, const SweepJob& b) { return key(a) < key(b); });
  return jobs;
}

SweepResult run_sweep(const ScenarioConfig& base, const AttackGrid& grid, int n_seeds, int n_benign,
                      unsigned threads) {
  const std::vector<SweepJob> jobs = make_sweep_jobs(base, grid, n_seeds, n_benign);
  const SemanticMap map = build_map(base.map);
  std::vector<RunRecord> records(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    records[i] = summarize(jobs[i].label, jobs[i].cfg, run_scenario(jobs[i].cfg, map));
  });
  return aggregate_runs(std::move(records));
}

SweepResult run_stealthy_sweep(const ScenarioConfig& base, double fraction, int n_seeds,
                               unsigned threads) {
  if (!std::isfinite(base.detector.dev_threshold))
    throw ConfigError("stealthy sweep needs a finite dev_threshold");
  AttackGrid grid{{fraction * base.detector.dev_threshold}, {1.0}};
  return run_sweep(base, grid, n_seeds, 0, threads);
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << kRunsHeader << '\n';
  for (const auto& r : runs) {
    out << r.label << ',' << detail::format_double(r.d) << ',' << detail::format_double(r.f) << ','
        << r.seed << ',' << (r.alarmed ? 1 : 0) << ',' << opt(r.alarm_time) << ','
        << opt(r.latency) << ',' << detail::format_double(r.max_true_dev) << ','
        << detail::format_double(r.final_speed) << ',' << detail::format_double(r.final_dev) << ','
        << detail::format_double(r.ld3_score) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& s) {
  out << "kind,d,f,runs,rate,mean_latency,max_latency,max_true_dev,max_abs_final_dev_alarmed,"
         "all_alarmed_stopped\n";
  out << "benign,,," << s.benign_runs << ',' << detail::format_double(s.fpr) << ",,,,,\n";
  for (const auto& g : s.grid) {
    out << "attack," << detail::format_double(g.d) << ',' << detail::format_double(g.f) << ','
        << g.runs << ',' << detail::format_double(g.tpr) << ',' << opt(g.mean_latency) << ','
        << opt(g.max_latency) << ',' << detail::format_double(g.max_true_dev) << ','
        << detail::format_double(g.max_abs_final_dev_alarmed) << ','
        << (g.all_alarmed_stopped ? 1 : 0) << '\n';
  }
}

void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& roc) {
  out << kRocHeader << '\n';
  for (const auto& p : roc)
    out << detail::format_double(p.fpr) << ',' << detail::format_double(p.tpr) << ','
        << (std::isinf(p.threshold) ? std::string("inf") : detail::format_double(p.threshold))
        << '\n';
}

namespace {

// Reads a header line followed by comma-separated rows of `width` fields.
template <class OnRow>
void read_csv(std::istream& in, std::string_view header, std::size_t width, OnRow&& on_row) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != header)
    throw ParseError(1, "expected header '" + std::string(header) + "'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(detail::trim(line), ',');
    if (fields.size() != width)
      throw ParseError(lineno, "expected " + std::to_string(width) + " fields, got " +
                                   std::to_string(fields.size()));
    on_row(fields, lineno);
  }
}

double need_num(std::string_view s, std::size_t line) {
  const auto v = detail::parse_double(s);
  if (!v) throw ParseError(line, "bad number '" + std::string(s) + "'");
  return *v;
}

std::optional<double> opt_num(std::string_view s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return need_num(s, line);
}

}  // namespace

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::vector<RunRecord> out;
  read_csv(in, kRunsHeader, 11, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    RunRecord r;
    r.label = std::string(f[0]);
    if (r.label != "benign" && r.label != "attack")
      throw ParseError(ln, "label must be benign or attack");
    r.d = need_num(f[1], ln);
    r.f = need_num(f[2], ln);
    const auto seed = detail::parse_int(f[3]);
    if (!seed || *seed < 0) throw ParseError(ln, "bad seed");
    r.seed = static_cast<std::uint64_t>(*seed);
    const auto alarmed = detail::parse_bool(f[4]);
    if (!alarmed) throw ParseError(ln, "bad alarmed flag");
    r.alarmed = *alarmed;
    r.alarm_time = opt_num(f[5], ln);
    r.latency = opt_num(f[6], ln);
    r.max_true_dev = need_num(f[7], ln);
    r.final_speed = need_num(f[8], ln);
    r.final_dev = need_num(f[9], ln);
    r.ld3_score = need_num(f[10], ln);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<RocPoint> read_roc_csv(std::istream& in) {
  std::vector<RocPoint> out;
  read_csv(in, kRocHeader, 3, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    out.push_back({need_num(f[0], ln), need_num(f[1], ln), need_num(f[2], ln)});
  });
  return out;
}

}  // namespace ld3
