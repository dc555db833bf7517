#include "ld3/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ld3/detail/text.hpp"
#include "ld3/errors.hpp"

namespace ld3 {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& key, const std::string& v) {
  const auto s = detail::trim(v);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  const auto d = detail::parse_double(s);
  if (!d) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return *d;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto b = detail::parse_bool(detail::trim(v));
  if (!b) throw ConfigError(key + ": expected a boolean, got '" + v + "'");
  return *b;
}

long long to_int(const std::string& key, const std::string& v) {
  const auto i = detail::parse_int(detail::trim(v));
  if (!i) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return *i;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return detail::format_double(v);
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

#define LD3_DOUBLE(member)                                                                  \
  Field {                                                                                   \
    [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, \
        [](const ScenarioConfig& c) { return fmt(c.member); }                               \
  }
#define LD3_BOOL(member)                                                                    \
  Field {                                                                                   \
    [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.member = to_bool(k, v); }, \
        [](const ScenarioConfig& c) { return std::string(c.member ? "true" : "false"); }    \
  }

// Ordered so config_to_string output is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"scenario.name",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) {
          c.name = std::string(detail::trim(v));
        },
        [](const ScenarioConfig& c) { return c.name; }}},
      {"scenario.duration", LD3_DOUBLE(duration)},
      {"scenario.seed",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          const auto s = to_int(k, v);
          if (s < 0) throw ConfigError(k + ": seed must be >= 0");
          c.seed = static_cast<std::uint64_t>(s);
        },
        [](const ScenarioConfig& c) { return std::to_string(c.seed); }}},
      {"map.kind",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          const auto s = detail::trim(v);
          if (s == "straight")
            c.map.kind = MapSpec::Kind::kStraight;
          else if (s == "curved")
            c.map.kind = MapSpec::Kind::kCurved;
          else if (s == "file")
            c.map.kind = MapSpec::Kind::kFile;
          else
            throw ConfigError(k + ": expected straight|curved|file");
        },
        [](const ScenarioConfig& c) {
          switch (c.map.kind) {
            case MapSpec::Kind::kStraight: return std::string("straight");
            case MapSpec::Kind::kCurved: return std::string("curved");
            case MapSpec::Kind::kFile: return std::string("file");
          }
          return std::string();
        }}},
      {"map.file",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) {
          c.map.file = std::string(detail::trim(v));
        },
        [](const ScenarioConfig& c) { return c.map.file.string(); }}},
      {"map.length", LD3_DOUBLE(map.length)},
      {"map.lane_width", LD3_DOUBLE(map.lane_width)},
      {"map.curve_radius", LD3_DOUBLE(map.curve_radius)},
      {"map.curve_angle", LD3_DOUBLE(map.curve_angle)},
      {"rates.control", LD3_DOUBLE(rates.control)},
      {"rates.gps", LD3_DOUBLE(rates.gps)},
      {"rates.lidar", LD3_DOUBLE(rates.lidar)},
      {"rates.ld", LD3_DOUBLE(rates.ld)},
      {"vehicle.speed", LD3_DOUBLE(initial.speed)},
      {"vehicle.target_speed", LD3_DOUBLE(target_speed)},
      {"vehicle.speed_gain", LD3_DOUBLE(speed_gain)},
      {"vehicle.accel_min", LD3_DOUBLE(accel_min)},
      {"vehicle.accel_max", LD3_DOUBLE(accel_max)},
      {"vehicle.wheelbase", LD3_DOUBLE(truth_coeffs.wheelbase)},
      {"vehicle.steer_noise", LD3_DOUBLE(steer_noise)},
      {"vehicle.accel_noise", LD3_DOUBLE(accel_noise)},
      {"noise.gps_sigma", LD3_DOUBLE(gps.sigma)},
      {"noise.lidar_sigma", LD3_DOUBLE(lidar.sigma)},
      {"noise.lidar_inflate_prob", LD3_DOUBLE(lidar.inflate_prob)},
      {"noise.lidar_inflate_factor", LD3_DOUBLE(lidar.inflate_factor)},
      {"ld.lateral_sigma", LD3_DOUBLE(ld.lateral_sigma)},
      {"ld.heading_sigma", LD3_DOUBLE(ld.heading_sigma)},
      {"ld.dropout_prob", LD3_DOUBLE(ld.dropout_prob)},
      {"ld.wrong_line_prob", LD3_DOUBLE(ld.wrong_line_prob)},
      {"msf.q_pos", LD3_DOUBLE(msf.q_pos)},
      {"msf.q_heading", LD3_DOUBLE(msf.q_heading)},
      {"msf.q_speed", LD3_DOUBLE(msf.q_speed)},
      {"msf.init_pos_sigma", LD3_DOUBLE(msf.init_pos_sigma)},
      {"msf.init_heading_sigma", LD3_DOUBLE(msf.init_heading_sigma)},
      {"msf.init_speed_sigma", LD3_DOUBLE(msf.init_speed_sigma)},
      {"attack.enabled", LD3_BOOL(attack.enabled)},
      {"attack.d", LD3_DOUBLE(attack.d)},
      {"attack.f", LD3_DOUBLE(attack.f)},
      {"attack.direction",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          const auto s = detail::trim(v);
          if (s == "left")
            c.attack.direction = AttackDirection::kLeft;
          else if (s == "right")
            c.attack.direction = AttackDirection::kRight;
          else
            throw ConfigError(k + ": expected left|right");
        },
        [](const ScenarioConfig& c) {
          return std::string(c.attack.direction == AttackDirection::kLeft ? "left" : "right");
        }}},
      {"attack.start_time", LD3_DOUBLE(attack.start_time)},
      {"attack.max_offset", LD3_DOUBLE(attack.max_offset)},
      {"detector.dev_threshold", LD3_DOUBLE(detector.dev_threshold)},
      {"detector.confirm_window",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.detector.confirm_window = static_cast<int>(to_int(k, v));
        },
        [](const ScenarioConfig& c) { return std::to_string(c.detector.confirm_window); }}},
      {"detector.suspend_in_intersection", LD3_BOOL(detector.suspend_in_intersection)},
      {"safestop.decel", LD3_DOUBLE(safestop.decel)},
      {"safestop.k_lat", LD3_DOUBLE(safestop.k_lat)},
      {"safestop.k_head", LD3_DOUBLE(safestop.k_head)},
      {"safestop.steering_limit", LD3_DOUBLE(safestop.steering_limit)},
      {"safestop.v_floor", LD3_DOUBLE(safestop.v_floor)},
  };
  return table;
}

#undef LD3_DOUBLE
#undef LD3_BOOL

}  // namespace

ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  std::map<std::string, const Field*> lookup;
  for (const auto& [key, field] : fields()) lookup[key] = &field;

  ScenarioConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside of any [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = lookup.find(full);
      if (it == lookup.end()) throw ConfigError("unknown config key '" + full + "'");
      it->second->set(cfg, full, value.data());
    }
  }
  if (cfg.map.kind == MapSpec::Kind::kFile && cfg.map.file.is_relative() && !base_dir.empty())
    cfg.map.file = base_dir / cfg.map.file;
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::string config_to_string(const ScenarioConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, field] : fields()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << key.substr(dot + 1) << " = " << field.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace ld3
