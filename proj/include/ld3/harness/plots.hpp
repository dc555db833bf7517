#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ld3/defense/roc.hpp"
#include "ld3/harness/scenario.hpp"

namespace ld3 {

struct RocSeries {
  std::string name;
  std::vector<RocPoint> points;
};

struct PlotInputs {
  std::vector<RocSeries> roc;
  std::vector<TraceRow> trace;      // one run, for the deviation plot
  std::optional<double> attack_start;
  std::vector<double> latencies;    // detection latencies of alarmed runs
};

struct PlotFiles {
  std::vector<std::filesystem::path> csv;
  std::vector<std::filesystem::path> svg;
};

/// Writes roc.{csv,svg}, deviation.{csv,svg} and latency.{csv,svg} into
/// `outdir`, each one only when its input is present (the latency histogram
/// goes with a sweep, i.e. with the ROC). The deviation plot draws the
/// attack start and the first alarm as vertical rules. Throws IoError when
/// there is neither a ROC nor a trace, or a file cannot be written.
PlotFiles emit_plots(const PlotInputs& in, const std::filesystem::path& outdir);

/// Histogram bin counts over [lo, lo + bins * width).
std::vector<std::size_t> histogram(const std::vector<double>& values, double lo, double width,
                                   std::size_t bins);

}  // namespace ld3
