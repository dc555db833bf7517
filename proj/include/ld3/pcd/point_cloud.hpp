#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace ld3 {

struct PointRecord {
  double x{};
  double y{};
  double z{};
  double intensity{};  // [0, 255]

  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

using PointCloud = std::vector<PointRecord>;

// ASCII PCD: '#' comment lines, then one "x y z intensity" per line. Values
// are written in shortest round-trip form, so write/read is bit-exact.
PointCloud parse_pcd(std::istream& in);
PointCloud read_pcd(const std::filesystem::path& path);
void write_pcd(std::ostream& out, const PointCloud& cloud);
void write_pcd(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace ld3
