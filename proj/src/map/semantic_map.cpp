#include "ld3/map/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

namespace {

double circular_mean(double a, double b) { return wrap_angle(a + 0.5 * wrap_angle(b - a)); }

struct SegmentHit {
  LanePoint point;
  double distance{};
  double signed_dev{};
};

SegmentHit project_on_segment(const LanePoint& a, const LanePoint& b, Vec2 p) {
  const Vec2 pa{a.x, a.y};
  const Vec2 dir = Vec2{b.x, b.y} - pa;
  const double len2 = dot(dir, dir);
  const double t = std::clamp(dot(p - pa, dir) / len2, 0.0, 1.0);
  const Vec2 q = pa + t * dir;
  const double heading = wrap_angle(a.heading + t * wrap_angle(b.heading - a.heading));
  const Vec2 rel = p - q;
  const double dist = norm(rel);
  const double side = cross(dir, rel);
  return {{q.x, q.y, heading}, dist, side < 0.0 ? -dist : dist};
}

}  // namespace

Lane Lane::from_points(std::string id, const std::vector<Vec2>& points, double width,
                       bool is_intersection) {
  if (points.size() < 2) throw std::invalid_argument("lane " + id + ": needs at least 2 points");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("lane " + id + ": width must be > 0");
  std::vector<double> seg_heading;
  seg_heading.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 d = points[i + 1] - points[i];
    if (d.x == 0.0 && d.y == 0.0)
      throw std::invalid_argument("lane " + id + ": repeated consecutive point");
    seg_heading.push_back(std::atan2(d.y, d.x));
  }
  Lane lane{std::move(id), {}, width, is_intersection};
  lane.centerline.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double h;
    if (i == 0)
      h = seg_heading.front();
    else if (i + 1 == points.size())
      h = seg_heading.back();
    else
      h = circular_mean(seg_heading[i - 1], seg_heading[i]);
    lane.centerline.push_back({points[i].x, points[i].y, wrap_angle(h)});
  }
  return lane;
}

SemanticMap::SemanticMap(std::vector<Lane> lanes, double max_query_distance)
    : lanes_(std::move(lanes)), max_query_distance_(max_query_distance) {
  if (lanes_.empty()) throw std::invalid_argument("semantic map needs at least one lane");
  if (!(max_query_distance_ > 0.0)) throw std::invalid_argument("max_query_distance must be > 0");
  for (const auto& lane : lanes_) {
    if (lane.centerline.size() < 2 || !(lane.width > 0.0))
      throw std::invalid_argument("lane " + lane.id + " violates invariants");
    for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
      const auto& a = lane.centerline[i];
      const auto& b = lane.centerline[i + 1];
      if (a.x == b.x && a.y == b.y)
        throw std::invalid_argument("lane " + lane.id + ": repeated consecutive point");
    }
  }
}

LaneProjection SemanticMap::project(const Pose2D& pose) const {
  LaneProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  const Vec2 p = pose.position();
  for (std::size_t li = 0; li < lanes_.size(); ++li) {
    const auto& cl = lanes_[li].centerline;
    for (std::size_t si = 0; si + 1 < cl.size(); ++si) {
      const SegmentHit hit = project_on_segment(cl[si], cl[si + 1], p);
      if (hit.distance < best.distance) {
        best = {li, si, hit.point, hit.distance, hit.signed_dev};
      }
    }
  }
  return best;
}

LaneProjection SemanticMap::bounded(const Pose2D& pose) const {
  LaneProjection proj = project(pose);
  if (!(proj.distance <= max_query_distance_)) throw NoLaneFound(proj.distance);
  return proj;
}

double SemanticMap::lane_dev(const Pose2D& pose) const { return bounded(pose).signed_dev; }

double SemanticMap::lane_width(const Pose2D& pose) const {
  return lanes_[bounded(pose).lane].width;
}

LanePoint SemanticMap::lane_point(const Pose2D& pose) const { return bounded(pose).point; }

bool SemanticMap::is_intersection(const Pose2D& pose) const {
  return lanes_[bounded(pose).lane].is_intersection;
}

SemanticMap build_straight_map(double length, double width) {
  if (!(length > 0.0)) throw std::invalid_argument("straight map length must be > 0");
  return SemanticMap({Lane::from_points("straight", {{0.0, 0.0}, {length, 0.0}}, width)});
}

SemanticMap build_curved_map(double straight_length, double radius, double arc_angle,
                             double width, double step) {
  if (!(straight_length > 0.0) || !(radius > 0.0) || !(arc_angle > 0.0) || !(step > 0.0))
    throw std::invalid_argument("curved map parameters must be > 0");
  std::vector<Vec2> pts;
  const int n_straight = std::max(1, static_cast<int>(std::ceil(straight_length / step)));
  for (int i = 0; i <= n_straight; ++i) pts.push_back({straight_length * i / n_straight, 0.0});
  // Arc centre sits to the left of the end of the straight.
  const Vec2 centre{straight_length, radius};
  const int n_arc = std::max(1, static_cast<int>(std::ceil(radius * arc_angle / step)));
  for (int i = 1; i <= n_arc; ++i) {
    const double phi = arc_angle * i / n_arc;
    pts.push_back({centre.x + radius * std::sin(phi), centre.y - radius * std::cos(phi)});
  }
  return SemanticMap({Lane::from_points("curved", pts, width)});
}

SemanticMap parse_map(std::istream& in) {
  struct Pending {
    std::string id;
    double width{};
    bool is_intersection{};
    std::size_t line{};
    std::vector<Vec2> points;
  };
  std::vector<Lane> lanes;
  std::optional<Pending> cur;

  auto flush = [&] {
    if (!cur) return;
    try {
      lanes.push_back(Lane::from_points(cur->id, cur->points, cur->width, cur->is_intersection));
    } catch (const std::invalid_argument& e) {
      throw ParseError(cur->line, e.what());
    }
    cur.reset();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "lane") {
      if (tok.size() != 4) throw ParseError(line_no, "expected: lane <id> <width> <is_intersection>");
      flush();
      const auto width = detail::parse_double(tok[2]);
      if (!width) throw ParseError(line_no, "bad lane width '" + std::string(tok[2]) + "'");
      if (!(*width > 0.0) || !std::isfinite(*width))
        throw ParseError(line_no, "lane width must be > 0");
      const auto inter = detail::parse_bool(tok[3]);
      if (!inter) throw ParseError(line_no, "bad is_intersection flag '" + std::string(tok[3]) + "'");
      cur = Pending{std::string(tok[1]), *width, *inter, line_no, {}};
    } else if (tok[0] == "pt") {
      if (!cur) throw ParseError(line_no, "pt before any lane header");
      if (tok.size() != 3) throw ParseError(line_no, "expected: pt <x> <y>");
      const auto x = detail::parse_double(tok[1]);
      const auto y = detail::parse_double(tok[2]);
      if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y))
        throw ParseError(line_no, "bad point coordinates");
      cur->points.push_back({*x, *y});
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(tok[0]) + "'");
    }
  }
  flush();
  if (lanes.empty()) throw ParseError(line_no, "map contains no lanes");
  return SemanticMap(std::move(lanes));
}

SemanticMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open map file " + path.string());
  return parse_map(in);
}

void write_map(std::ostream& out, const SemanticMap& map) {
  out << "# lane <id> <width> <is_intersection>, then pt <x> <y>\n";
  for (const auto& lane : map.lanes()) {
    out << "lane " << lane.id << ' ' << detail::format_double(lane.width) << ' '
        << (lane.is_intersection ? 1 : 0) << '\n';
    for (const auto& p : lane.centerline)
      out << "pt " << detail::format_double(p.x) << ' ' << detail::format_double(p.y) << '\n';
  }
}

void save_map(const std::filesystem::path& path, const SemanticMap& map) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write map file " + path.string());
  write_map(out, map);
}

}  // namespace ld3
