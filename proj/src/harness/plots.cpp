#include "ld3/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

namespace {

using detail::format_double;

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

// Linear data-to-pixel mapping for one plot panel.
struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

void open_svg(std::ostream& o, const Frame& fr, const std::string& title, const std::string& xl,
              const std::string& yl) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\">" << xl << "</text>\n"
    << "<text x=\"14\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
    << kHeight / 2 << ")\">" << yl << "</text>\n"
    << "<rect class=\"axes\" x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
    << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = fr.x0 + (fr.x1 - fr.x0) * i / 4.0;
    const double y = fr.y0 + (fr.y1 - fr.y0) * i / 4.0;
    o << "<text x=\"" << fr.px(x) << "\" y=\"" << kHeight - kMargin + 15
      << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n"
      << "<text x=\"" << kMargin - 5 << "\" y=\"" << fr.py(y) + 4 << "\" text-anchor=\"end\">"
      << fmt(y) << "</text>\n";
  }
}

void polyline(std::ostream& o, const Frame& fr, const std::vector<std::pair<double, double>>& pts,
              const char* color, const std::string& cls) {
  o << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
    << "\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : pts) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    o << fr.px(x) << ',' << fr.py(y) << ' ';
  }
  o << "\"/>\n";
}

void vrule(std::ostream& o, const Frame& fr, double x, const char* color, const std::string& cls,
           const std::string& label) {
  o << "<line class=\"" << cls << "\" x1=\"" << fr.px(x) << "\" x2=\"" << fr.px(x) << "\" y1=\""
    << kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"" << color
    << "\" stroke-dasharray=\"4 3\"/>\n"
    << "<text x=\"" << fr.px(x) + 3 << "\" y=\"" << kMargin + 12 << "\" fill=\"" << color << "\">"
    << label << "</text>\n";
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) throw IoError("write failed for " + p.string());
}

}  // namespace

std::vector<std::size_t> histogram(const std::vector<double>& values, double lo, double width,
                                   std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  if (bins == 0 || !(width > 0.0)) return counts;
  for (double v : values) {
    const double k = std::floor((v - lo) / width);
    if (k >= 0.0 && k < static_cast<double>(bins)) ++counts[static_cast<std::size_t>(k)];
  }
  return counts;
}

PlotFiles emit_plots(const PlotInputs& in, const std::filesystem::path& outdir) {
  const bool has_roc = std::any_of(in.roc.begin(), in.roc.end(),
                                   [](const RocSeries& s) { return !s.points.empty(); });
  if (!has_roc && in.trace.empty()) {
    throw IoError(
        "nothing to plot; need at least one of: ROC points (fpr,tpr,threshold), "
        "a per-step trace of one run (deviation time series)");
  }
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());

  PlotFiles files;

  if (has_roc) {
    const auto csv = outdir / "roc.csv";
    auto f = open_out(csv);
    f << "series,fpr,tpr,threshold\n";
    for (const auto& s : in.roc)
      for (const auto& p : s.points)
        f << s.name << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
          << (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) << '\n';
    finish(f, csv);
    files.csv.push_back(csv);

    const auto svg = outdir / "roc.svg";
    auto o = open_out(svg);
    const Frame fr{0.0, 1.0, 0.0, 1.0};
    open_svg(o, fr, "ROC", "false positive rate", "true positive rate");
    polyline(o, fr, {{0.0, 0.0}, {1.0, 1.0}}, "#aaaaaa", "chance");
    for (std::size_t i = 0; i < in.roc.size(); ++i) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : in.roc[i].points) pts.emplace_back(p.fpr, p.tpr);
      const char* color = kColors[i % 4];
      polyline(o, fr, pts, color, "roc");
      o << "<text x=\"" << kWidth - kMargin - 5 << "\" y=\"" << kHeight - kMargin - 10 - 15.0 * i
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << in.roc[i].name << "</text>\n";
    }
    o << "</svg>\n";
    finish(o, svg);
    files.svg.push_back(svg);
  }

  if (!in.trace.empty()) {
    std::optional<double> alarm;
    for (const auto& r : in.trace)
      if (r.alarmed) {
        alarm = r.t;
        break;
      }
    const auto csv = outdir / "deviation.csv";
    auto f = open_out(csv);
    f << "t,true_dev,d_ld,d_msf,alarmed\n";
    double lo = 0.0, hi = 0.0;
    for (const auto& r : in.trace) {
      f << format_double(r.t) << ',' << format_double(r.true_dev) << ',' << format_double(r.d_ld)
        << ',' << format_double(r.d_msf) << ',' << (r.alarmed ? 1 : 0) << '\n';
      for (double v : {r.true_dev, r.d_ld, r.d_msf})
        if (std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
    }
    finish(f, csv);
    files.csv.push_back(csv);

    const double pad = std::max(0.1, 0.05 * (hi - lo));
    Frame fr{in.trace.front().t, in.trace.back().t, lo - pad, hi + pad};
    if (fr.x1 <= fr.x0) fr.x1 = fr.x0 + 1.0;
    const auto svg = outdir / "deviation.svg";
    auto o = open_out(svg);
    open_svg(o, fr, "Lateral deviation", "time (s)", "deviation (m)");
    std::vector<std::pair<double, double>> truth, ld, msf;
    for (const auto& r : in.trace) {
      truth.emplace_back(r.t, r.true_dev);
      ld.emplace_back(r.t, r.d_ld);
      msf.emplace_back(r.t, r.d_msf);
    }
    polyline(o, fr, truth, kColors[0], "true_dev");
    polyline(o, fr, ld, kColors[2], "d_ld");
    polyline(o, fr, msf, kColors[1], "d_msf");
    if (in.attack_start) vrule(o, fr, *in.attack_start, "#ff7f0e", "attack-start", "attack start");
    if (alarm) vrule(o, fr, *alarm, "#000000", "alarm", "alarm");
    o << "</svg>\n";
    finish(o, svg);
    files.svg.push_back(svg);
  }

  if (has_roc || !in.latencies.empty()) {
    const double hi = in.latencies.empty()
                          ? 1.0
                          : *std::max_element(in.latencies.begin(), in.latencies.end());
    constexpr std::size_t kBins = 20;
    const double width = std::max(hi, 1e-3) * 1.0001 / kBins;
    const auto counts = histogram(in.latencies, 0.0, width, kBins);
    const auto csv = outdir / "latency.csv";
    auto f = open_out(csv);
    f << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < kBins; ++i)
      f << format_double(width * i) << ',' << format_double(width * (i + 1)) << ',' << counts[i]
        << '\n';
    finish(f, csv);
    files.csv.push_back(csv);

    const double top = std::max<double>(1.0, *std::max_element(counts.begin(), counts.end()));
    const Frame fr{0.0, width * kBins, 0.0, top};
    const auto svg = outdir / "latency.svg";
    auto o = open_out(svg);
    open_svg(o, fr, "Detection latency", "latency (s)", "runs");
    for (std::size_t i = 0; i < kBins; ++i) {
      if (counts[i] == 0) continue;
      const double x = fr.px(width * i), x2 = fr.px(width * (i + 1));
      const double y = fr.py(static_cast<double>(counts[i]));
      o << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << x2 - x
        << "\" height=\"" << fr.py(0.0) - y << "\" fill=\"" << kColors[0] << "\"/>\n";
    }
    o << "</svg>\n";
    finish(o, svg);
    files.svg.push_back(svg);
  }
  return files;
}

}  // namespace ld3
