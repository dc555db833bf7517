#include "ld3/harness/trace_io.hpp"

#include <array>
#include <fstream>
#include <string>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

namespace {

constexpr std::array<std::string_view, 37> kColumns = {
    "t",          "true_x",       "true_y",      "true_heading", "true_speed", "gps_valid",
    "gps_x",      "gps_y",        "gps_var",     "spoofed",      "lidar_valid", "lidar_x",
    "lidar_y",    "msf_x",        "msf_y",       "msf_heading",  "msf_speed",  "ld_valid",
    "left_present", "left_c0",    "left_c1",     "left_c2",      "left_c3",    "right_present",
    "right_c0",   "right_c1",     "right_c2",    "right_c3",     "d_ld",       "d_msf",
    "delta",      "counter",      "alarmed",     "steering",     "accel",      "source",
    "true_dev"};

std::string f(double v) { return detail::format_double(v); }
const char* b(bool v) { return v ? "1" : "0"; }

}  // namespace

std::span<const std::string_view> trace_columns() { return kColumns; }

void write_trace(std::ostream& out, std::span<const TraceRow> rows) {
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    out << f(r.t) << ',' << f(r.truth.x) << ',' << f(r.truth.y) << ',' << f(r.truth.heading) << ','
        << f(r.truth.speed) << ',' << b(r.gps_valid) << ',' << f(r.gps.x) << ',' << f(r.gps.y) << ','
        << f(r.gps_var) << ',' << b(r.spoofed) << ',' << b(r.lidar_valid) << ',' << f(r.lidar.x)
        << ',' << f(r.lidar.y) << ',' << f(r.msf.x) << ',' << f(r.msf.y) << ',' << f(r.msf.heading)
        << ',' << f(r.msf.speed) << ',' << b(r.ld_valid) << ',' << b(r.left_present);
    for (double c : r.left) out << ',' << f(c);
    out << ',' << b(r.right_present);
    for (double c : r.right) out << ',' << f(c);
    out << ',' << f(r.d_ld) << ',' << f(r.d_msf) << ',' << f(r.delta) << ',' << r.counter << ','
        << b(r.alarmed) << ',' << f(r.steering) << ',' << f(r.accel) << ','
        << (r.source == ControlSource::kLd ? "ld" : "msf") << ',' << f(r.true_dev) << '\n';
  }
}

void write_trace(const std::filesystem::path& path, std::span<const TraceRow> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_trace(out, rows);
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  {
    const auto cols = detail::split(detail::trim(line), ',');
    if (cols.size() != kColumns.size()) throw ParseError(1, "header has wrong number of columns");
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] != kColumns[i])
        throw ParseError(1, "header column " + std::to_string(i + 1) + " is '" +
                                std::string(cols[i]) + "', expected '" + std::string(kColumns[i]) + "'");
  }
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto tok = detail::split(trimmed, ',');
    if (tok.size() != kColumns.size())
      throw ParseError(line_no, "row has " + std::to_string(tok.size()) + " fields, expected " +
                                    std::to_string(kColumns.size()));
    std::size_t i = 0;
    auto num = [&]() {
      const auto v = detail::parse_double(tok[i]);
      if (!v) throw ParseError(line_no, "bad number in column " + std::string(kColumns[i]));
      ++i;
      return *v;
    };
    auto flag = [&]() {
      if (tok[i] != "0" && tok[i] != "1")
        throw ParseError(line_no, "bad flag in column " + std::string(kColumns[i]));
      return tok[i++] == "1";
    };
    TraceRow r;
    r.t = num();
    r.truth = {num(), num(), num(), num()};
    r.gps_valid = flag();
    r.gps = {num(), num()};
    r.gps_var = num();
    r.spoofed = flag();
    r.lidar_valid = flag();
    r.lidar = {num(), num()};
    r.msf = {num(), num(), num(), num()};
    r.ld_valid = flag();
    r.left_present = flag();
    for (double& c : r.left) c = num();
    r.right_present = flag();
    for (double& c : r.right) c = num();
    r.d_ld = num();
    r.d_msf = num();
    r.delta = num();
    const auto counter = detail::parse_int(tok[i]);
    if (!counter) throw ParseError(line_no, "bad integer in column counter");
    r.counter = static_cast<int>(*counter);
    ++i;
    r.alarmed = flag();
    r.steering = num();
    r.accel = num();
    if (tok[i] == "ld")
      r.source = ControlSource::kLd;
    else if (tok[i] == "msf")
      r.source = ControlSource::kMsf;
    else
      throw ParseError(line_no, "bad control source");
    ++i;
    r.true_dev = num();
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace ld3
