#include "covplan/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace covplan {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

double angle_gap(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

}  // namespace

double LatticeConfig::heading_angle(int bin) const noexcept { return kTwoPi * bin / n_theta; }

void LatticeConfig::validate() const {
  if (n_theta < 4) throw LatticeError("n_theta must be at least 4");
  if (speeds.empty()) throw LatticeError("at least one speed level is required");
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    if (speeds[i] < 0.0) throw LatticeError("speed levels must be non-negative");
    if (i > 0 && !(speeds[i] > speeds[i - 1])) throw LatticeError("speed levels must be strictly ascending");
  }
  if (!(accel_max > 0.0) || !(turn_rate_max > 0.0)) throw LatticeError("dynamic bounds must be positive");
  if (duration <= 0) throw LatticeError("primitive duration must be positive");
  if (!(cell_size > 0.0)) throw LatticeError("cell size must be positive");
  if (max_heading_change < 0) throw LatticeError("max_heading_change must be non-negative");
  if (!(dense_dt > 0.0)) throw LatticeError("dense_dt must be positive");
}

PoseSample evaluate_profile(double theta0, double v0, double accel, double turn_rate, double corr_x, double corr_y,
                            double duration, double t) {
  PoseSample p;
  p.t = t;
  p.theta = theta0 + turn_rate * t;
  p.v = v0 + accel * t;
  if (std::abs(turn_rate) < 1e-12) {
    const double s = v0 * t + 0.5 * accel * t * t;
    p.x = s * std::cos(theta0);
    p.y = s * std::sin(theta0);
  } else {
    const double w = turn_rate;
    auto fx = [&](double tau) {
      const double th = theta0 + w * tau;
      return (v0 + accel * tau) * std::sin(th) / w + accel * std::cos(th) / (w * w);
    };
    auto fy = [&](double tau) {
      const double th = theta0 + w * tau;
      return -(v0 + accel * tau) * std::cos(th) / w + accel * std::sin(th) / (w * w);
    };
    p.x = fx(t) - fx(0.0);
    p.y = fy(t) - fy(0.0);
  }
  const double half = 0.5 * duration;
  const double k = t <= half ? 0.5 * t * t : 0.25 * duration * duration - 0.5 * (duration - t) * (duration - t);
  p.x += corr_x * k;
  p.y += corr_y * k;
  return p;
}

PrimitiveLibrary::PrimitiveLibrary(LatticeConfig config) : config_(std::move(config)) {
  config_.validate();
  buckets_.resize(static_cast<std::size_t>(config_.n_theta) * static_cast<std::size_t>(config_.n_speeds()));
}

std::size_t PrimitiveLibrary::bucket(int heading, int speed) const {
  if (heading < 0 || heading >= config_.n_theta || speed < 0 || speed >= config_.n_speeds()) {
    throw LatticeError("heading/speed index out of range");
  }
  return static_cast<std::size_t>(heading) * static_cast<std::size_t>(config_.n_speeds()) +
         static_cast<std::size_t>(speed);
}

const std::vector<MotionPrimitive>& PrimitiveLibrary::from(int heading, int speed) const {
  return buckets_[bucket(heading, speed)];
}

void PrimitiveLibrary::add(MotionPrimitive p) {
  auto& b = buckets_[bucket(p.start_heading, p.start_speed)];
  p.id = static_cast<int>(b.size());
  b.push_back(std::move(p));
}

std::size_t PrimitiveLibrary::size() const noexcept {
  std::size_t n = 0;
  for (const auto& b : buckets_) n += b.size();
  return n;
}

double PrimitiveLibrary::average_out_degree() const noexcept {
  if (buckets_.empty()) return 0.0;
  return static_cast<double>(size()) / static_cast<double>(buckets_.size());
}

double PrimitiveLibrary::max_displacement_rate() const noexcept {
  double best = 0.0;
  for (const auto& b : buckets_) {
    for (const auto& p : b) {
      best = std::max(best, std::hypot(p.dx, p.dy) * config_.cell_size / p.duration);
    }
  }
  return best;
}

namespace {

void fill_samples(MotionPrimitive& p, const LatticeConfig& cfg) {
  const double theta0 = cfg.heading_angle(p.start_heading);
  const double v0 = cfg.speeds[static_cast<std::size_t>(p.start_speed)];
  p.poses_1s.clear();
  p.dense_poses.clear();
  for (int s = 1; s <= p.duration; ++s) {
    p.poses_1s.push_back(evaluate_profile(theta0, v0, p.accel, p.turn_rate, p.corr_x, p.corr_y, p.duration, s));
  }
  const int n_dense = static_cast<int>(std::ceil(p.duration / cfg.dense_dt - 1e-9));
  for (int i = 0; i <= n_dense; ++i) {
    const double t = std::min(static_cast<double>(p.duration), i * cfg.dense_dt);
    p.dense_poses.push_back(evaluate_profile(theta0, v0, p.accel, p.turn_rate, p.corr_x, p.corr_y, p.duration, t));
  }
}

}  // namespace

std::string check_primitive(const MotionPrimitive& p, const LatticeConfig& cfg) {
  if (p.start_heading < 0 || p.start_heading >= cfg.n_theta || p.end_heading < 0 || p.end_heading >= cfg.n_theta) {
    return "heading bin out of range";
  }
  if (p.start_speed < 0 || p.start_speed >= cfg.n_speeds() || p.end_speed < 0 || p.end_speed >= cfg.n_speeds()) {
    return "speed level out of range";
  }
  if (p.duration != cfg.duration) return "duration differs from lattice duration";
  if (std::abs(p.turn_rate) > cfg.turn_rate_max + 1e-12) return "turn rate exceeds bound";

  const double theta0 = cfg.heading_angle(p.start_heading);
  const double v0 = cfg.speeds[static_cast<std::size_t>(p.start_speed)];
  const double v1 = cfg.speeds[static_cast<std::size_t>(p.end_speed)];
  const double T = p.duration;

  constexpr int kChecksPerSecond = 100;
  const int n = p.duration * kChecksPerSecond;
  for (int i = 0; i <= n; ++i) {
    const double t = T * i / n;
    const double th = theta0 + p.turn_rate * t;
    const double s = v0 + p.accel * t;
    if (s < -1e-9) return "speed becomes negative";
    // The correction flips sign at T/2; check both sides of the switch there.
    const bool at_switch = 2 * i == n;
    for (double sign : {1.0, -1.0}) {
      if (!at_switch && (sign > 0) != (t < 0.5 * T)) continue;
      const double ax = p.accel * std::cos(th) - s * p.turn_rate * std::sin(th) + sign * p.corr_x;
      const double ay = p.accel * std::sin(th) + s * p.turn_rate * std::cos(th) + sign * p.corr_y;
      if (std::hypot(ax, ay) > cfg.accel_max + 1e-9) return "acceleration exceeds bound";
    }
  }

  const PoseSample end = evaluate_profile(theta0, v0, p.accel, p.turn_rate, p.corr_x, p.corr_y, T, T);
  if (std::abs(end.x - p.dx * cfg.cell_size) > 1e-6 || std::abs(end.y - p.dy * cfg.cell_size) > 1e-6) {
    return "endpoint does not land on the lattice";
  }
  if (angle_gap(end.theta, cfg.heading_angle(p.end_heading)) > 1e-9) return "end heading off lattice";
  if (std::abs(end.v - v1) > 1e-9) return "end speed off lattice";
  if (static_cast<int>(p.poses_1s.size()) != p.duration) return "expected one pose per second";
  for (int s = 1; s <= p.duration; ++s) {
    const PoseSample ref = evaluate_profile(theta0, v0, p.accel, p.turn_rate, p.corr_x, p.corr_y, T, s);
    const PoseSample& got = p.poses_1s[static_cast<std::size_t>(s - 1)];
    if (std::abs(ref.x - got.x) > 1e-6 || std::abs(ref.y - got.y) > 1e-6 || std::abs(ref.t - got.t) > 1e-9) {
      return "per-second pose disagrees with the profile";
    }
  }
  return {};
}

PrimitiveLibrary generate_primitives(const LatticeConfig& config) {
  PrimitiveLibrary lib(config);
  const double T = config.duration;
  const double bin = kTwoPi / config.n_theta;

  std::vector<int> heading_changes{0};
  for (int d = 1; d <= config.max_heading_change; ++d) {
    heading_changes.push_back(-d);
    heading_changes.push_back(d);
  }

  for (int h = 0; h < config.n_theta; ++h) {
    for (int k = 0; k < config.n_speeds(); ++k) {
      std::set<std::tuple<int, int, int, int>> seen;
      for (int dk : {0, -1, 1}) {
        const int k1 = k + dk;
        if (k1 < 0 || k1 >= config.n_speeds()) continue;
        for (int dh : heading_changes) {
          MotionPrimitive p;
          p.start_heading = h;
          p.start_speed = k;
          p.end_heading = ((h + dh) % config.n_theta + config.n_theta) % config.n_theta;
          p.end_speed = k1;
          p.duration = config.duration;
          const double v0 = config.speeds[static_cast<std::size_t>(k)];
          const double v1 = config.speeds[static_cast<std::size_t>(k1)];
          p.accel = (v1 - v0) / T;
          p.turn_rate = dh * bin / T;

          std::ostringstream tag;
          tag << "primitive h=" << h << " v=" << k << " dh=" << dh << " dv=" << dk;
          if (std::abs(p.turn_rate) > config.turn_rate_max) {
            lib.add_warning(tag.str() + " dropped: turn rate exceeds bound");
            continue;
          }
          const PoseSample nominal = evaluate_profile(config.heading_angle(h), v0, p.accel, p.turn_rate, 0.0, 0.0, T, T);
          p.dx = static_cast<int>(std::lround(nominal.x / config.cell_size));
          p.dy = static_cast<int>(std::lround(nominal.y / config.cell_size));
          // Bang-bang correction moves the endpoint by corr * T^2 / 4.
          p.corr_x = 4.0 * (p.dx * config.cell_size - nominal.x) / (T * T);
          p.corr_y = 4.0 * (p.dy * config.cell_size - nominal.y) / (T * T);
          if (!seen.insert({p.dx, p.dy, p.end_heading, p.end_speed}).second) continue;
          fill_samples(p, config);
          if (std::string why = check_primitive(p, config); !why.empty()) {
            lib.add_warning(tag.str() + " dropped: " + why);
            continue;
          }
          lib.add(std::move(p));
        }
      }
    }
  }
  if (lib.size() == 0) throw LatticeError("primitive generation produced an empty library");
  return lib;
}

Waypoint waypoint_at(const MotionPrimitive& p, const RobotState& anchor, int tick, double cell_size) {
  if (tick < 1 || tick > p.duration) throw LatticeError("tick outside primitive");
  const PoseSample& s = p.poses_1s[static_cast<std::size_t>(tick - 1)];
  return {anchor.x(cell_size) + s.x, anchor.y(cell_size) + s.y, s.theta, s.v, anchor.t + tick};
}

std::vector<Waypoint> waypoints_1s(const MotionPrimitive& p, const RobotState& anchor, double cell_size) {
  if (anchor.heading != p.start_heading || anchor.speed != p.start_speed) {
    throw LatticeError("anchor state does not match primitive start heading/speed");
  }
  std::vector<Waypoint> out;
  out.reserve(static_cast<std::size_t>(p.duration));
  for (int tick = 1; tick <= p.duration; ++tick) out.push_back(waypoint_at(p, anchor, tick, cell_size));
  return out;
}

Waypoint lattice_waypoint(const RobotState& s, const LatticeConfig& config) {
  return {s.x(config.cell_size), s.y(config.cell_size), config.heading_angle(s.heading),
          config.speeds.at(static_cast<std::size_t>(s.speed)), s.t};
}

std::vector<RobotSuccessor> robot_successors(const RobotState& s, const PrimitiveLibrary& lib, const CoverageMap& map,
                                             const StateFilter& filter) {
  std::vector<RobotSuccessor> out;
  const double cs = lib.config().cell_size;
  for (const MotionPrimitive& p : lib.from(s.heading, s.speed)) {
    RobotState next{s.cx + p.dx, s.cy + p.dy, p.end_heading, p.end_speed, s.t + p.duration};
    if (!map.in_bounds(next.cell())) continue;
    bool inside = true;
    for (const PoseSample& w : p.poses_1s) {
      if (!map.contains_point(s.x(cs) + w.x, s.y(cs) + w.y)) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    if (filter && !filter(next)) continue;
    out.push_back({next, &p});
  }
  return out;
}

void write_primitives(std::ostream& out, const PrimitiveLibrary& lib) {
  const LatticeConfig& c = lib.config();
  out << std::setprecision(17);
  out << "mprim v1\n";
  out << "n_theta " << c.n_theta << '\n';
  out << "speeds";
  for (double v : c.speeds) out << ' ' << v;
  out << '\n';
  out << "accel_max " << c.accel_max << '\n';
  out << "turn_rate_max " << c.turn_rate_max << '\n';
  out << "duration " << c.duration << '\n';
  out << "cell_size " << c.cell_size << '\n';
  out << "max_heading_change " << c.max_heading_change << '\n';
  out << "dense_dt " << c.dense_dt << '\n';
  out << "primitives " << lib.size() << '\n';
  for (int h = 0; h < c.n_theta; ++h) {
    for (int k = 0; k < c.n_speeds(); ++k) {
      for (const MotionPrimitive& p : lib.from(h, k)) {
        out << "primitive " << p.start_heading << ' ' << p.start_speed << ' ' << p.dx << ' ' << p.dy << ' '
            << p.end_heading << ' ' << p.end_speed << ' ' << p.duration << ' ' << p.accel << ' ' << p.turn_rate << ' '
            << p.corr_x << ' ' << p.corr_y << '\n';
        for (const PoseSample& s : p.poses_1s) {
          out << "  " << s.t << ' ' << s.x << ' ' << s.y << ' ' << s.theta << ' ' << s.v << '\n';
        }
      }
    }
  }
}

namespace {

template <typename T>
T expect_field(std::istream& in, const std::string& key, int& line) {
  std::string k;
  T value{};
  ++line;
  if (!(in >> k) || k != key || !(in >> value)) {
    throw LatticeError("mprim:" + std::to_string(line) + ": expected '" + key + " <value>'");
  }
  return value;
}

}  // namespace

PrimitiveLibrary read_primitives(std::istream& in) {
  std::string magic, version;
  int line = 1;
  if (!(in >> magic >> version) || magic != "mprim") throw LatticeError("mprim:1: missing 'mprim v1' header");
  if (version != "v1") throw LatticeError("mprim:1: unsupported version '" + version + "'");

  LatticeConfig c;
  c.n_theta = expect_field<int>(in, "n_theta", line);
  {
    ++line;
    std::string k;
    in >> k;
    if (k != "speeds") throw LatticeError("mprim:" + std::to_string(line) + ": expected 'speeds'");
    std::string rest;
    std::getline(in, rest);
    std::istringstream ss(rest);
    c.speeds.clear();
    double v = 0;
    while (ss >> v) c.speeds.push_back(v);
  }
  c.accel_max = expect_field<double>(in, "accel_max", line);
  c.turn_rate_max = expect_field<double>(in, "turn_rate_max", line);
  c.duration = expect_field<int>(in, "duration", line);
  c.cell_size = expect_field<double>(in, "cell_size", line);
  c.max_heading_change = expect_field<int>(in, "max_heading_change", line);
  c.dense_dt = expect_field<double>(in, "dense_dt", line);
  const auto count = expect_field<std::size_t>(in, "primitives", line);

  PrimitiveLibrary lib(c);
  for (std::size_t i = 0; i < count; ++i) {
    ++line;
    std::string tag;
    MotionPrimitive p;
    if (!(in >> tag) || tag != "primitive" ||
        !(in >> p.start_heading >> p.start_speed >> p.dx >> p.dy >> p.end_heading >> p.end_speed >> p.duration >>
          p.accel >> p.turn_rate >> p.corr_x >> p.corr_y)) {
      throw LatticeError("mprim:" + std::to_string(line) + ": malformed primitive header");
    }
    if (p.duration <= 0 || p.duration > 1000) {
      throw LatticeError("mprim:" + std::to_string(line) + ": bad duration");
    }
    for (int s = 0; s < p.duration; ++s) {
      ++line;
      PoseSample ps;
      if (!(in >> ps.t >> ps.x >> ps.y >> ps.theta >> ps.v)) {
        throw LatticeError("mprim:" + std::to_string(line) + ": malformed pose sample");
      }
      p.poses_1s.push_back(ps);
    }
    if (std::string why = check_primitive(p, c); !why.empty()) {
      throw LatticeError("mprim: primitive " + std::to_string(i) + " invalid: " + why);
    }
    fill_samples(p, c);
    lib.add(std::move(p));
  }
  std::string trailing;
  if (in >> trailing) throw LatticeError("mprim: trailing data after last primitive");
  if (lib.size() == 0) throw LatticeError("mprim: empty library");
  return lib;
}

PrimitiveLibrary load_primitives(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LatticeError("cannot open primitive file '" + path + "'");
  return read_primitives(in);
}

void save_primitives(const std::string& path, const PrimitiveLibrary& lib) {
  std::ofstream out(path);
  if (!out) throw LatticeError("cannot write primitive file '" + path + "'");
  write_primitives(out, lib);
}

}  // namespace covplan
