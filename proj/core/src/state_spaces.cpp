#include "covplan/state_spaces.hpp"

#include <algorithm>
#include <stdexcept>

namespace covplan {

std::size_t SensorStateHash::operator()(const SensorState& s) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(s.level) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<std::uint64_t>(s.psi) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(s.history_size) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  for (std::uint8_t i = 0; i < s.history_size; ++i) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint8_t>(s.history[i])) + 0x9E3779B97F4A7C15ULL + (h << 6) +
         (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

void SensorPlanProblem::validate(const SensorGeometry& geom) const {
  if (waypoints.empty()) throw std::invalid_argument("sensor planning needs at least one waypoint");
  if (history < 0 || history > kMaxHistory) {
    throw std::invalid_argument("history size must be in [0, " + std::to_string(kMaxHistory) + "]");
  }
  if (psi0 < 0 || psi0 >= geom.psi_bins) throw std::invalid_argument("initial sensor bin out of range");
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i].t != waypoints[i - 1].t + 1) throw std::invalid_argument("waypoints must be 1 s apart");
  }
}

SensorState sensor_start(const SensorPlanProblem& problem) {
  SensorState s;
  s.level = 0;
  s.psi = problem.psi0;
  return s;
}

std::vector<SensorState> sensor_successors(const SensorState& s, const SensorPlanProblem& problem,
                                           const SensorGeometry& geom) {
  if (s.level >= problem.last_level()) throw std::logic_error("sensor state at terminal level has no successors");
  SensorState base;
  base.level = s.level + 1;
  const int keep = problem.history;
  // history ++ [psi], truncated to the last H entries.
  std::array<std::int8_t, kMaxHistory + 1> extended{};
  std::size_t n = 0;
  for (std::uint8_t i = 0; i < s.history_size; ++i) extended[n++] = s.history[i];
  extended[n++] = static_cast<std::int8_t>(s.psi);
  const std::size_t take = std::min<std::size_t>(n, static_cast<std::size_t>(keep));
  base.history_size = static_cast<std::uint8_t>(take);
  for (std::size_t i = 0; i < take; ++i) base.history[i] = extended[n - take + i];

  std::vector<SensorState> out;
  out.reserve(3);
  for (int d : {-1, 0, 1}) {
    SensorState c = base;
    c.psi = geom.wrap_bin(s.psi + d);
    out.push_back(c);
  }
  return out;
}

std::vector<CellIndex> history_cells(const SensorPlanProblem& problem, const SensorState& s,
                                     const SensorGeometry& geom, const CoverageMap& map) {
  std::vector<CellIndex> cells;
  const int n = s.history_size;
  for (int j = 0; j < n; ++j) {
    const int level = s.level - n + j;
    if (level < 0) continue;
    const Waypoint& w = problem.waypoints.at(static_cast<std::size_t>(level));
    const Footprint fp = footprint_cells(map, w.x, w.y, geom.psi_angle(s.history[static_cast<std::size_t>(j)]), geom,
                                         w.theta);
    cells.insert(cells.end(), fp.cells.begin(), fp.cells.end());
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

// ---------------------------------------------------------------------------

namespace {

template <int Bits>
std::uint64_t field(int value, const char* name) {
  if (value < 0 || value >= (1 << Bits)) throw std::out_of_range(std::string("joint key field out of range: ") + name);
  return static_cast<std::uint64_t>(value);
}

}  // namespace

std::uint64_t joint_state_key(const JointState& s) {
  std::uint64_t k = field<12>(s.anchor.cx, "x");
  k = (k << 12) | field<12>(s.anchor.cy, "y");
  k = (k << 5) | field<5>(s.anchor.heading, "theta");
  k = (k << 3) | field<3>(s.anchor.speed, "v");
  k = (k << 12) | field<12>(s.anchor.t, "t");
  k = (k << 6) | field<6>(s.primitive + 1, "primitive");
  k = (k << 4) | field<4>(s.tick, "tick");
  k = (k << 5) | field<5>(s.psi, "psi");
  return k;
}

std::size_t JointStateHash::operator()(const JointState& s) const noexcept {
  std::uint64_t k = 0;
  k = static_cast<std::uint64_t>(s.anchor.cx) & 0xFFF;
  k = (k << 12) | (static_cast<std::uint64_t>(s.anchor.cy) & 0xFFF);
  k = (k << 5) | (static_cast<std::uint64_t>(s.anchor.heading) & 0x1F);
  k = (k << 3) | (static_cast<std::uint64_t>(s.anchor.speed) & 0x7);
  k = (k << 12) | (static_cast<std::uint64_t>(s.anchor.t) & 0xFFF);
  k = (k << 6) | (static_cast<std::uint64_t>(s.primitive + 1) & 0x3F);
  k = (k << 4) | (static_cast<std::uint64_t>(s.tick) & 0xF);
  k = (k << 5) | (static_cast<std::uint64_t>(s.psi) & 0x1F);
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  return static_cast<std::size_t>(k);
}

JointSpace::JointSpace(const CoverageMap& map, const PrimitiveLibrary& lib, const SensorGeometry& geom,
                       CostParams params, EdgeMode mode, int t_max, Cost shift)
    : map_(&map), lib_(&lib), geom_(geom), params_(params), mode_(mode), t_max_(t_max), shift_(shift) {
  if (t_max >= (1 << 12)) throw std::invalid_argument("time horizon exceeds joint key range");
  if (geom.psi_bins > 32) throw std::invalid_argument("psi bins exceed joint key range");
}

JointState JointSpace::start(const RobotState& robot, int psi) const {
  JointState s;
  s.anchor = robot;
  s.psi = static_cast<std::int8_t>(geom_.wrap_bin(psi));
  return s;
}

const MotionPrimitive* JointSpace::primitive(const JointState& s) const {
  if (s.at_lattice()) return nullptr;
  return &lib_->at(s.anchor.heading, s.anchor.speed, s.primitive);
}

Waypoint JointSpace::pose(const JointState& s) const {
  if (s.at_lattice()) return lattice_waypoint(s.anchor, lib_->config());
  return waypoint_at(*primitive(s), s.anchor, s.tick, lib_->config().cell_size);
}

Footprint JointSpace::footprint(const JointState& s) const {
  const Waypoint w = pose(s);
  return footprint_cells(*map_, w.x, w.y, geom_.psi_angle(s.psi), geom_, w.theta);
}

Cost JointSpace::coverage_cost(const JointState& s) const {
  const Footprint fp = footprint(s);
  return footprint_cost(fp.cells, *map_, params_.lambda, [](CellIndex) { return false; });
}

Cost JointSpace::edge_cost(Cost coverage) const { return edge_cost_joint(coverage + shift_, params_, mode_); }

template <typename Emit>
void JointSpace::for_each_successor(const JointState& s, Emit&& emit) const {
  const int duration = lib_->config().duration;
  auto emit_psi = [&](JointState child, const MotionPrimitive* p) {
    for (int d : {-1, 0, 1}) {
      child.psi = static_cast<std::int8_t>(geom_.wrap_bin(s.psi + d));
      emit(child, p);
    }
  };
  auto advance = [&](const RobotState& anchor, const MotionPrimitive& p, int next_tick) {
    JointState child;
    if (next_tick >= duration) {
      child.anchor = {anchor.cx + p.dx, anchor.cy + p.dy, p.end_heading, p.end_speed, anchor.t + p.duration};
    } else {
      child.anchor = anchor;
      child.primitive = static_cast<std::int16_t>(p.id);
      child.tick = static_cast<std::int8_t>(next_tick);
    }
    emit_psi(child, &p);
  };

  if (s.at_lattice()) {
    if (s.anchor.t + duration > t_max_) return;
    for (const RobotSuccessor& rs : robot_successors(s.anchor, *lib_, *map_)) advance(s.anchor, *rs.primitive, 1);
  } else {
    advance(s.anchor, *primitive(s), s.tick + 1);
  }
}

void JointSpace::expand(const JointState& s, std::vector<Successor<JointState>>& out) const {
  for_each_successor(s, [&](const JointState& child, const MotionPrimitive*) {
    out.push_back({child, edge_cost(coverage_cost(child))});
  });
}

std::vector<JointEdge> JointSpace::joint_successors(const JointState& s) const {
  std::vector<JointEdge> out;
  for_each_successor(s, [&](const JointState& child, const MotionPrimitive* p) {
    JointEdge e;
    e.to = child;
    e.footprint = footprint(child);
    e.coverage_cost = footprint_cost(e.footprint.cells, *map_, params_.lambda, [](CellIndex) { return false; });
    e.cost = edge_cost(e.coverage_cost);
    e.primitive = p;
    out.push_back(std::move(e));
  });
  return out;
}

}  // namespace covplan
