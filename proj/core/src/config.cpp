#include "covplan/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace covplan {

void PlannerConfig::validate() const {
  try {
    lattice.validate();
    sensor.validate();
    cost.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (search.w1 < 1.0 || search.w2 < 1.0) throw ConfigError("search weights must be >= 1");
  if (search.t_max <= 0 || search.t_max >= 4096) throw ConfigError("search.t_max must be in (0, 4096)");
  if (!(search.r_min > 0.0)) throw ConfigError("search.r_min must be positive");
  if (search.dubins_headings < 1) throw ConfigError("search.dubins_headings must be positive");
  if (splash.h_max < 0 || splash.h_max > 8) throw ConfigError("splash.h_max must be in [0, 8]");
  if (splash.psi0 < -1 || splash.psi0 >= sensor.psi_bins) throw ConfigError("splash.psi0 out of range");
  if (!(split.timeout_s >= 0.0) || !(baseline.timeout_s >= 0.0)) throw ConfigError("timeouts must be non-negative");
  if (split.joint_history != 0) {
    throw ConfigError("split.joint_history: sensor history in the joint space is not supported (must be 0)");
  }
  if (bench.maps <= 0 || bench.pairs <= 0 || bench.width <= 0 || bench.height <= 0 || bench.minutes < 0) {
    throw ConfigError("bench sizes must be positive");
  }
  if (bench.lifetime < 0) throw ConfigError("bench.lifetime must be non-negative");
  if (!(bench.nc_fraction >= 0.0 && bench.nc_fraction < 1.0)) throw ConfigError("bench.nc_fraction must be in [0, 1)");
  if (bench.jobs < 0) throw ConfigError("bench.jobs must be non-negative");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError("config key '" + key + "': bad value '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + text + "'");
}

struct Field {
  std::function<std::string(const PlannerConfig&)> get;
  std::function<void(PlannerConfig&, const std::string&, const std::string&)> set;
};

#define COVPLAN_FIELD(KEY, EXPR, KIND)                                                                     \
  {                                                                                                        \
    KEY, Field {                                                                                           \
      [](const PlannerConfig& c) { return KIND##_out(c.EXPR); },                                           \
          [](PlannerConfig& c, const std::string& k, const std::string& v) { c.EXPR = KIND##_in<decltype(c.EXPR)>(k, v); } \
    }                                                                                                      \
  }

std::string num_out(double v) { return format_double(v); }
std::string num_out(int v) { return std::to_string(v); }
std::string num_out(unsigned long v) { return std::to_string(v); }
template <typename T>
T num_in(const std::string& k, const std::string& v) {
  return parse_number<T>(k, v);
}
std::string flag_out(bool v) { return v ? "true" : "false"; }
template <typename T>
T flag_in(const std::string& k, const std::string& v) {
  return parse_bool(k, v);
}
std::string list_out(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}
template <typename T>
T list_in(const std::string& k, const std::string& v) {
  T out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(k, item));
  if (out.empty()) throw ConfigError("config key '" + k + "': empty list");
  return out;
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      COVPLAN_FIELD("lattice.n_theta", lattice.n_theta, num),
      COVPLAN_FIELD("lattice.speeds", lattice.speeds, list),
      COVPLAN_FIELD("lattice.accel_max", lattice.accel_max, num),
      COVPLAN_FIELD("lattice.turn_rate_max", lattice.turn_rate_max, num),
      COVPLAN_FIELD("lattice.duration", lattice.duration, num),
      COVPLAN_FIELD("lattice.cell_size", lattice.cell_size, num),
      COVPLAN_FIELD("lattice.max_heading_change", lattice.max_heading_change, num),
      COVPLAN_FIELD("lattice.dense_dt", lattice.dense_dt, num),
      COVPLAN_FIELD("sensor.rect_length", sensor.rect_length, num),
      COVPLAN_FIELD("sensor.rect_width", sensor.rect_width, num),
      COVPLAN_FIELD("sensor.offset", sensor.offset, num),
      COVPLAN_FIELD("sensor.psi_bins", sensor.psi_bins, num),
      COVPLAN_FIELD("cost.lambda", cost.lambda, num),
      COVPLAN_FIELD("cost.w_motion", cost.w_motion, num),
      COVPLAN_FIELD("cost.w_sensor", cost.w_sensor, num),
      COVPLAN_FIELD("search.w1", search.w1, num),
      COVPLAN_FIELD("search.w2", search.w2, num),
      COVPLAN_FIELD("search.t_max", search.t_max, num),
      COVPLAN_FIELD("search.r_min", search.r_min, num),
      COVPLAN_FIELD("search.dubins_headings", search.dubins_headings, num),
      COVPLAN_FIELD("splash.h_max", splash.h_max, num),
      COVPLAN_FIELD("splash.psi0", splash.psi0, num),
      COVPLAN_FIELD("split.timeout_s", split.timeout_s, num),
      COVPLAN_FIELD("split.reanchor", split.reanchor, flag),
      COVPLAN_FIELD("split.strict_goal", split.strict_goal, flag),
      COVPLAN_FIELD("split.joint_history", split.joint_history, num),
      COVPLAN_FIELD("split.max_nodes", split.max_nodes, num),
      COVPLAN_FIELD("baseline.timeout_s", baseline.timeout_s, num),
      COVPLAN_FIELD("baseline.max_nodes", baseline.max_nodes, num),
      COVPLAN_FIELD("bench.seed", bench.seed, num),
      COVPLAN_FIELD("bench.maps", bench.maps, num),
      COVPLAN_FIELD("bench.pairs", bench.pairs, num),
      COVPLAN_FIELD("bench.width", bench.width, num),
      COVPLAN_FIELD("bench.height", bench.height, num),
      COVPLAN_FIELD("bench.minutes", bench.minutes, num),
      COVPLAN_FIELD("bench.lifetime", bench.lifetime, num),
      COVPLAN_FIELD("bench.nc_fraction", bench.nc_fraction, num),
      COVPLAN_FIELD("bench.min_separation", bench.min_separation, num),
      COVPLAN_FIELD("bench.jobs", bench.jobs, num),
  };
  return table;
}

#undef COVPLAN_FIELD

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(PlannerConfig& cfg, const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

PlannerConfig parse_config(std::istream& in) {
  PlannerConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "config v1") throw ConfigError("config:" + std::to_string(line_no) + ": expected 'config v1' header");
      header = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config:" + std::to_string(line_no) + ": expected key=value");
    try {
      apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ConfigError("config: missing 'config v1' header");
  cfg.validate();
  return cfg;
}

PlannerConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const PlannerConfig& cfg) {
  std::string out = "config v1\n";
  for (const auto& [key, field] : fields()) out += key + "=" + field.get(cfg) + "\n";
  return out;
}

}  // namespace covplan
