#include "covplan/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace covplan {

std::vector<Waypoint> chain_waypoints(const RobotState& start, const std::vector<PrimitiveStep>& chain,
                                      const PrimitiveLibrary& lib) {
  const LatticeConfig& cfg = lib.config();
  std::vector<Waypoint> out{lattice_waypoint(start, cfg)};
  RobotState at = start;
  for (const PrimitiveStep& step : chain) {
    if (step.from != at) throw LatticeError("primitive chain is not contiguous");
    const MotionPrimitive& p = lib.at(at.heading, at.speed, step.primitive);
    for (int tick = 1; tick < p.duration; ++tick) out.push_back(waypoint_at(p, at, tick, cfg.cell_size));
    at = {at.cx + p.dx, at.cy + p.dy, p.end_heading, p.end_speed, at.t + p.duration};
    out.push_back(lattice_waypoint(at, cfg));
  }
  return out;
}

std::vector<std::string> trajectory_violations(const Trajectory& traj, const CoverageMap& map,
                                               const SensorGeometry& geom, const PrimitiveLibrary* lib) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const TrajectoryStep& s = traj.steps[i];
    const std::string at = "step " + std::to_string(i) + ": ";
    if (s.psi < 0 || s.psi >= geom.psi_bins) issues.push_back(at + "psi bin out of range");
    if (i > 0) {
      const TrajectoryStep& prev = traj.steps[i - 1];
      if (s.t != prev.t + 1) issues.push_back(at + "timestamps must increase by 1 s");
      if (geom.bin_distance(s.psi, prev.psi) > 1) issues.push_back(at + "pan rate exceeds one step per second");
    }
    try {
      const Footprint fp = footprint_cells(map, s.x, s.y, geom.psi_angle(s.psi), geom, s.theta);
      if (fp.cells != s.footprint) issues.push_back(at + "footprint does not regenerate from pose");
    } catch (const MapError& e) {
      issues.push_back(at + e.what());
    }
  }
  if (lib != nullptr && !traj.steps.empty()) {
    if (!traj.primitives.empty()) {
      try {
        const auto wps = chain_waypoints(traj.primitives.front().from, traj.primitives, *lib);
        if (wps.size() != traj.steps.size()) {
          issues.push_back("primitive chain length does not match step count");
        } else {
          for (std::size_t i = 0; i < wps.size(); ++i) {
            if (wps[i].t != traj.steps[i].t || wps[i].x != traj.steps[i].x || wps[i].y != traj.steps[i].y) {
              issues.push_back("step " + std::to_string(i) + ": pose differs from primitive chain");
              break;
            }
          }
        }
      } catch (const std::exception& e) {
        issues.push_back(std::string("primitive chain invalid: ") + e.what());
      }
      const double expected = static_cast<double>(traj.primitives.size()) * lib->config().duration;
      if (std::abs(traj.motion_cost - expected) > 1e-9) issues.push_back("motion cost differs from primitive time");
    } else if (traj.steps.size() != 1) {
      issues.push_back("trajectory without primitives must have exactly one step");
    }
  }
  return issues;
}

namespace {

std::string format_cost(Cost c) {
  const bool neg = c < 0;
  const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(c + 1)) + 1 : static_cast<std::uint64_t>(c);
  std::ostringstream s;
  s << (neg ? "-" : "") << mag / kCostScale << '.' << std::setw(6) << std::setfill('0') << mag % kCostScale;
  return s.str();
}

Cost parse_cost(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos || text.size() - dot - 1 != 6) throw std::runtime_error("traj: malformed cost '" + text + "'");
  const bool neg = !text.empty() && text[0] == '-';
  const std::string whole = text.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
  const std::string frac = text.substr(dot + 1);
  long long w = 0, f = 0;
  auto r1 = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  auto r2 = std::from_chars(frac.data(), frac.data() + frac.size(), f);
  if (r1.ec != std::errc{} || r1.ptr != whole.data() + whole.size() || r2.ec != std::errc{} ||
      r2.ptr != frac.data() + frac.size()) {
    throw std::runtime_error("traj: malformed cost '" + text + "'");
  }
  const Cost mag = w * kCostScale + f;
  return neg ? -mag : mag;
}

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error("traj: " + what); }

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) fail("expected '" + word + "'");
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << std::setprecision(17);
  out << "traj v1\n";
  out << "psi_bins " << traj.psi_bins << '\n';
  out << "motion_cost " << traj.motion_cost << '\n';
  out << "sensor_cost " << format_cost(traj.sensor_cost) << '\n';
  out << "steps " << traj.steps.size() << '\n';
  const double step = 2.0 * std::numbers::pi / traj.psi_bins;
  for (const TrajectoryStep& s : traj.steps) {
    out << s.t << ' ' << s.x << ' ' << s.y << ' ' << s.theta << ' ' << s.v << ' ' << step * s.psi << '\n';
  }
  out << "footprints " << traj.steps.size() << '\n';
  for (const TrajectoryStep& s : traj.steps) {
    out << s.footprint.size();
    for (CellIndex c : s.footprint) out << ' ' << c.row << ' ' << c.col;
    out << '\n';
  }
  out << "primitives " << traj.primitives.size() << '\n';
  for (const PrimitiveStep& p : traj.primitives) {
    out << p.from.cx << ' ' << p.from.cy << ' ' << p.from.heading << ' ' << p.from.speed << ' ' << p.from.t << ' '
        << p.primitive << '\n';
  }
}

Trajectory read_trajectory(std::istream& in) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "traj") fail("missing 'traj v1' header");
  if (version != "v1") fail("unsupported version '" + version + "'");
  Trajectory traj;
  expect(in, "psi_bins");
  if (!(in >> traj.psi_bins) || traj.psi_bins < 3 || traj.psi_bins > 32) fail("bad psi_bins");
  expect(in, "motion_cost");
  if (!(in >> traj.motion_cost)) fail("bad motion_cost");
  expect(in, "sensor_cost");
  std::string cost_text;
  in >> cost_text;
  traj.sensor_cost = parse_cost(cost_text);
  expect(in, "steps");
  std::size_t n = 0;
  if (!(in >> n)) fail("bad step count");
  const double step = 2.0 * std::numbers::pi / traj.psi_bins;
  traj.steps.resize(n);
  for (auto& s : traj.steps) {
    double psi = 0;
    if (!(in >> s.t >> s.x >> s.y >> s.theta >> s.v >> psi)) fail("malformed step line");
    const long turns = std::lround(psi / step);
    if (std::abs(psi - turns * step) > 1e-9) fail("psi is not on a sensor bin");
    s.psi = static_cast<int>(((turns % traj.psi_bins) + traj.psi_bins) % traj.psi_bins);
  }
  expect(in, "footprints");
  std::size_t m = 0;
  if (!(in >> m) || m != n) fail("footprint block must match step count");
  for (auto& s : traj.steps) {
    std::size_t k = 0;
    if (!(in >> k)) fail("malformed footprint line");
    s.footprint.resize(k);
    for (auto& c : s.footprint) {
      if (!(in >> c.row >> c.col)) fail("malformed footprint cell");
    }
    if (!std::is_sorted(s.footprint.begin(), s.footprint.end())) fail("footprint cells must be sorted");
  }
  expect(in, "primitives");
  std::size_t np = 0;
  if (!(in >> np)) fail("bad primitive count");
  traj.primitives.resize(np);
  for (auto& p : traj.primitives) {
    if (!(in >> p.from.cx >> p.from.cy >> p.from.heading >> p.from.speed >> p.from.t >> p.primitive)) {
      fail("malformed primitive line");
    }
  }
  std::string extra;
  if (in >> extra) fail("trailing data");
  return traj;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file '" + path + "'");
  return read_trajectory(in);
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file '" + path + "'");
  write_trajectory(out, traj);
}

}  // namespace covplan
