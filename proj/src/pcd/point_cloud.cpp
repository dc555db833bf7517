#include "ld3/pcd/point_cloud.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

PointCloud parse_pcd(std::istream& in) {
  PointCloud cloud;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tok = detail::split_ws(line);
    if (tok.size() != 4) throw ParseError(line_no, "expected 4 fields: x y z intensity");
    double v[4];
    for (int i = 0; i < 4; ++i) {
      const auto d = detail::parse_double(tok[i]);
      if (!d || !std::isfinite(*d)) throw ParseError(line_no, "bad number '" + std::string(tok[i]) + "'");
      v[i] = *d;
    }
    cloud.push_back({v[0], v[1], v[2], v[3]});
  }
  return cloud;
}

PointCloud read_pcd(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_pcd(in);
}

void write_pcd(std::ostream& out, const PointCloud& cloud) {
  out << "# x y z intensity\n";
  for (const auto& p : cloud) {
    out << detail::format_double(p.x) << ' ' << detail::format_double(p.y) << ' '
        << detail::format_double(p.z) << ' ' << detail::format_double(p.intensity) << '\n';
  }
}

void write_pcd(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_pcd(out, cloud);
}

}  // namespace ld3
