// Point-cloud lane-marking lab: marking edits on a directory of clouds, a
// synthetic road-trace generator and the locator dependency experiment.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"
#include "ld3/pcd/experiment.hpp"

namespace fs = std::filesystem;
using namespace ld3;
using detail::format_double;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;

std::vector<fs::path> list_pcd(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("input directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pcd") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_edit(const fs::path& input, const std::string& mode, const MarkingEditConfig& cfg,
             const fs::path& out) {
  auto files = list_pcd(input);
  // Scan files of a synthetic trace; the reference map is not edited.
  files.erase(std::remove_if(files.begin(), files.end(),
                             [](const fs::path& p) { return p.filename() == "reference.pcd"; }),
              files.end());
  if (files.empty()) throw ConfigError("no .pcd files in " + input.string());
  make_dir(out);
  auto metrics = open_out(out / "metrics.csv");
  metrics << "file,mode,points,ground_inliers,median,threshold,markings,moved,skipped\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const PointCloud cloud = read_pcd(files[i]);
    const VariantClouds v = make_variants(cloud, cfg, i);
    const WrongMarkingResult& w = v.wrong_marking;
    const bool wrong = mode == "wrong-marking";
    write_pcd(out / files[i].filename(), wrong ? w.points : v.no_marking);
    metrics << files[i].filename().string() << ',' << mode << ',' << cloud.size() << ','
            << v.ground.inliers.size() << ',' << format_double(w.median) << ','
            << format_double(w.threshold) << ',' << w.markings << ',' << (wrong ? w.moved : 0)
            << ',' << (wrong ? w.skipped : 0) << '\n';
  }
  std::cout << "wrote " << files.size() << " clouds to " << out.string() << "\n";
  return 0;
}

int cmd_synth(const SyntheticTraceConfig& cfg, const fs::path& out) {
  const LidarTrace t = generate_synthetic_trace(cfg);
  make_dir(out);
  write_pcd(out / "reference.pcd", t.reference);
  auto truth = open_out(out / "truth.csv");
  truth << "scan,x,y\n";
  for (std::size_t i = 0; i < t.scans.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scan_%03zu.pcd", i);
    write_pcd(out / name, t.scans[i]);
    truth << name << ',' << format_double(t.truth[i].x) << ',' << format_double(t.truth[i].y)
          << '\n';
  }
  std::cout << "wrote " << t.scans.size() << " scans to " << out.string() << "\n";
  return 0;
}

std::map<std::string, Vec2> read_truth(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read " + p.string());
  std::string line;
  std::getline(in, line);
  if (detail::trim(line) != "scan,x,y") throw ParseError(1, "expected header 'scan,x,y'");
  std::map<std::string, Vec2> out;
  for (std::size_t ln = 2; std::getline(in, line); ++ln) {
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(detail::trim(line), ',');
    if (f.size() != 3) throw ParseError(ln, "expected 3 fields");
    const auto x = detail::parse_double(f[1]);
    const auto y = detail::parse_double(f[2]);
    if (!x || !y) throw ParseError(ln, "bad coordinate");
    out[std::string(f[0])] = {*x, *y};
  }
  return out;
}

int cmd_experiment(const fs::path& input, const std::string& locator_kind,
                   const MarkingEditConfig& cfg, const fs::path& out) {
  const PointCloud reference = read_pcd(input / "reference.pcd");
  const auto truth_by_name = read_truth(input / "truth.csv");
  std::vector<PointCloud> scans;
  std::vector<Vec2> truth;
  for (const auto& [name, pos] : truth_by_name) {
    scans.push_back(read_pcd(input / name));
    truth.push_back(pos);
  }
  const auto locator = locator_kind == "intensity" ? make_intensity_locator(reference)
                                                   : make_geometry_locator(reference);
  const DependencyReport r = run_dependency_experiment(scans, truth, *locator, cfg);
  std::cout << "locator " << locator->name() << " scans " << scans.size() << "\n"
            << "r no-marking " << format_double(r.r_no_marking) << " wrong-marking "
            << format_double(r.r_wrong_marking) << "\n"
            << "RMSE original " << format_double(r.rmse_original) << " no-marking "
            << format_double(r.rmse_no_marking) << " wrong-marking "
            << format_double(r.rmse_wrong_marking) << "\n";
  if (!out.empty()) {
    make_dir(out);
    auto f = open_out(out / "dependency.csv");
    f << "locator,variant,r,strong,rmse\n"
      << locator->name() << ",original,1,1," << format_double(r.rmse_original) << '\n'
      << locator->name() << ",no-marking," << format_double(r.r_no_marking) << ','
      << (r.strong_no_marking ? 1 : 0) << ',' << format_double(r.rmse_no_marking) << '\n'
      << locator->name() << ",wrong-marking," << format_double(r.r_wrong_marking) << ','
      << (r.strong_wrong_marking ? 1 : 0) << ',' << format_double(r.rmse_wrong_marking) << '\n';
    auto u = open_out(out / "uncertainty.csv");
    u << "scan,original,no_marking,wrong_marking\n";
    for (std::size_t i = 0; i < r.uncertainty_original.size(); ++i)
      u << i << ',' << format_double(r.uncertainty_original[i]) << ','
        << format_double(r.uncertainty_no_marking[i]) << ','
        << format_double(r.uncertainty_wrong_marking[i]) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-marking edits and LiDAR locator dependency experiments"};
  app.require_subcommand(1);

  MarkingEditConfig edit;
  double threshold = 0.0;
  std::string side = "left";
  fs::path input, out;
  std::string mode;

  auto add_edit_options = [&](CLI::App* cmd) {
    cmd->add_option("--lane-width", edit.lane_width, "lane width, m")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", threshold, "marking intensity threshold (default: median + 3 MAD)");
    cmd->add_option("--seed", edit.seed, "RANSAC seed");
    cmd->add_option("--side", side, "wrong-marking shift direction")
        ->check(CLI::IsMember({"left", "right"}));
  };

  auto* ed = app.add_subcommand("edit", "remove or shift lane markings in every cloud of a directory");
  ed->add_option("--input", input, "directory of .pcd files")->required();
  ed->add_option("--mode", mode, "edit to apply")
      ->required()
      ->check(CLI::IsMember({"no-marking", "wrong-marking"}));
  ed->add_option("--out", out, "output directory")->required();
  add_edit_options(ed);

  SyntheticTraceConfig synth;
  auto* sy = app.add_subcommand("synth", "generate a synthetic road trace");
  sy->add_option("--count", synth.count, "number of scans")->check(CLI::PositiveNumber);
  sy->add_option("--seed", synth.seed, "generator seed");
  sy->add_option("--lane-width", synth.lane_width, "lane width, m")->check(CLI::PositiveNumber);
  sy->add_option("--out", out, "output directory")->required();

  std::string locator = "geometry";
  auto* ex = app.add_subcommand("experiment", "uncertainty correlation and RMSE under marking edits");
  ex->add_option("--input", input, "directory written by synth")->required();
  ex->add_option("--locator", locator, "locator kind")
      ->check(CLI::IsMember({"geometry", "intensity"}));
  ex->add_option("--out", out, "output directory");
  add_edit_options(ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  if (app.get_subcommand_ptr("edit")->count("--threshold") ||
      app.get_subcommand_ptr("experiment")->count("--threshold"))
    edit.intensity_threshold = threshold;
  edit.offset_side = side == "left" ? +1 : -1;

  try {
    if (*ed) return cmd_edit(input, mode, edit, out);
    if (*sy) return cmd_synth(synth, out);
    if (*ex) return cmd_experiment(input, locator, edit, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
