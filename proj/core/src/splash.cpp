#include "covplan/splash.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covplan {

std::size_t SpatialStateHash::operator()(const SpatialState& s) const noexcept {
  std::uint64_t k = static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.cx));
  k = (k << 20) ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.cy));
  k = (k << 8) ^ static_cast<std::uint64_t>(s.heading);
  k = (k << 4) ^ static_cast<std::uint64_t>(s.speed);
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  return static_cast<std::size_t>(k);
}

double heuristic_speed(const PrimitiveLibrary& lib) {
  const double v = lib.max_displacement_rate();
  if (!(v > 0.0)) throw std::invalid_argument("primitive library has no moving primitive");
  return v;
}

namespace {

// Truncation keeps an admissible bound admissible after scaling.
Cost seconds_to_cost(double seconds) {
  if (!std::isfinite(seconds)) return std::numeric_limits<Cost>::max() / 4;
  return static_cast<Cost>(std::floor(seconds * static_cast<double>(kCostScale)));
}

void check_grids(const CoverageMap& map, const PrimitiveLibrary& lib) {
  if (std::abs(map.cell_size() - lib.config().cell_size) > 1e-12) {
    throw std::invalid_argument("lattice cell size must equal the map cell size");
  }
}

}  // namespace

RobotPlan plan_robot(const RobotState& start, CellIndex goal, const CoverageMap& map, const PrimitiveLibrary& lib,
                     const SearchConfig& search, const RobotSearchLimits& limits) {
  check_grids(map, lib);
  if (!map.in_bounds(start.cell())) throw MapError("start cell out of bounds");
  const GoalCell g = make_goal(map, goal);
  const LatticeConfig& cfg = lib.config();
  const double cs = cfg.cell_size;

  RobotPlan plan;
  plan.start = start;
  if (start.cell() == goal) {
    plan.status = SearchStatus::Found;
    plan.waypoints = {lattice_waypoint(start, cfg)};
    return plan;
  }

  const double v = heuristic_speed(lib);
  const DijkstraField field(map, goal);
  auto h_anchor = [&](const SpatialState& s) {
    return seconds_to_cost(h_euclidean((s.cx + 0.5) * cs, (s.cy + 0.5) * cs, g, v));
  };
  std::vector<std::function<Cost(const SpatialState&)>> extra;
  extra.emplace_back([&](const SpatialState& s) {
    const double len = dubins_length_free_heading((s.cx + 0.5) * cs, (s.cy + 0.5) * cs, cfg.heading_angle(s.heading),
                                                  g.x, g.y, search.r_min, search.dubins_headings);
    return seconds_to_cost(len / v);
  });
  extra.emplace_back([&](const SpatialState& s) { return seconds_to_cost(h_dijkstra(field, {s.cy, s.cx}, v)); });

  std::vector<RobotSuccessor> succ;
  auto expand = [&](const SpatialState& s, std::vector<Successor<SpatialState>>& out) {
    const RobotState r{s.cx, s.cy, s.heading, s.speed, 0};
    for (const RobotSuccessor& rs : robot_successors(r, lib, map)) {
      out.push_back({{rs.state.cx, rs.state.cy, rs.state.heading, rs.state.speed},
                     static_cast<Cost>(primitive_cost(*rs.primitive)) * kCostScale});
    }
  };
  auto is_goal = [&](const SpatialState& s) { return s.cx == goal.col && s.cy == goal.row; };

  SearchOptions<SpatialState> options;
  options.deadline = limits.deadline;
  options.max_expansions = limits.max_expansions;
  options.g_limit = static_cast<Cost>(std::max(0, search.t_max - start.t)) * kCostScale;

  const SpatialState s0{start.cx, start.cy, start.heading, start.speed};
  const auto result = mhastar<SpatialState, SpatialStateHash>(s0, is_goal, expand, h_anchor, extra, search.w1,
                                                              search.w2, options);
  plan.status = result.status;
  plan.expansions = result.expansions;
  plan.wall_ms = result.wall_ms;
  if (!result.found()) return plan;

  RobotState at = start;
  for (std::size_t i = 1; i < result.path.size(); ++i) {
    const SpatialState& next = result.path[i];
    const MotionPrimitive* used = nullptr;
    for (const MotionPrimitive& p : lib.from(at.heading, at.speed)) {
      if (at.cx + p.dx == next.cx && at.cy + p.dy == next.cy && p.end_heading == next.heading &&
          p.end_speed == next.speed) {
        used = &p;
        break;
      }
    }
    if (used == nullptr) throw std::logic_error("robot path step matches no primitive");
    plan.chain.push_back({at, used->id});
    at = {next.cx, next.cy, next.heading, next.speed, at.t + used->duration};
    plan.motion_cost += used->duration;
  }
  plan.waypoints = chain_waypoints(start, plan.chain, lib);
  return plan;
}

// ---------------------------------------------------------------------------

bool SensorLess::operator()(const SensorState& a, const SensorState& b) const noexcept {
  if (a.level != b.level) return a.level < b.level;
  auto dist = [&](int bin) {
    const int d = ((bin - psi0) % bins + bins) % bins;
    return std::min(d, bins - d);
  };
  if (a.psi != b.psi) {
    const int da = dist(a.psi), db = dist(b.psi);
    if (da != db) return da < db;
    return a.psi < b.psi;
  }
  if (a.history_size != b.history_size) return a.history_size < b.history_size;
  // Most recent history entries dominate.
  for (int i = a.history_size - 1; i >= 0; --i) {
    const int ha = a.history[static_cast<std::size_t>(i)], hb = b.history[static_cast<std::size_t>(i)];
    if (ha == hb) continue;
    const int da = dist(ha), db = dist(hb);
    if (da != db) return da < db;
    return ha < hb;
  }
  return false;
}

namespace {

class FootprintTable {
 public:
  FootprintTable(const std::vector<Waypoint>& wps, const CoverageMap& map, const SensorGeometry& geom)
      : bins_(geom.psi_bins) {
    table_.reserve(wps.size() * static_cast<std::size_t>(bins_));
    for (const Waypoint& w : wps) {
      for (int b = 0; b < bins_; ++b) table_.push_back(footprint_cells(map, w.x, w.y, geom.psi_angle(b), geom, w.theta));
    }
  }
  [[nodiscard]] const Footprint& at(int level, int psi) const {
    return table_[static_cast<std::size_t>(level) * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(psi)];
  }

 private:
  int bins_;
  std::vector<Footprint> table_;
};

// History-aware cost of the footprint at (level, psi) given the previous pan bins.
Cost tick_cost(const FootprintTable& fps, int level, int psi, std::span<const std::int8_t> history,
               const CoverageMap& map, const CostParams& params) {
  const int n = static_cast<int>(history.size());
  return footprint_cost(fps.at(level, psi).cells, map, params.lambda, [&](CellIndex c) {
    for (int j = 0; j < n; ++j) {
      const int lv = level - n + j;
      if (lv < 0) continue;
      const auto& cells = fps.at(lv, history[static_cast<std::size_t>(j)]).cells;
      if (std::binary_search(cells.begin(), cells.end(), c)) return true;
    }
    return false;
  });
}

}  // namespace

SensorPlan plan_sensor(const std::vector<Waypoint>& waypoints, int psi0, int history, const CoverageMap& map,
                       const SensorGeometry& geom, const CostParams& params) {
  const auto t0 = Clock::now();
  SensorPlanProblem problem{waypoints, psi0, history};
  problem.validate(geom);
  const FootprintTable fps(waypoints, map, geom);
  const Cost shift = coverage_cost_shift(map, geom, params);
  const int last = problem.last_level();

  auto expand = [&](const SensorState& s, std::vector<Successor<SensorState>>& out) {
    for (const SensorState& c : sensor_successors(s, problem, geom)) {
      out.push_back({c, tick_cost(fps, c.level, c.psi, c.recent(), map, params) + shift});
    }
  };
  auto is_goal = [&](const SensorState& s) { return s.level == last; };
  auto h0 = [](const SensorState&) -> Cost { return 0; };
  const SensorLess less{geom.wrap_bin(psi0), geom.psi_bins};
  const auto result = astar<SensorState, SensorStateHash, SensorLess>(sensor_start(problem), is_goal, expand, h0,
                                                                      1.0, {}, less);
  if (!result.found()) throw std::logic_error("sensor search failed on a leveled DAG");

  SensorPlan plan;
  plan.shift = shift;
  plan.shifted_cost = result.cost;
  plan.cost = result.cost - shift * last;
  plan.expansions = result.expansions;
  plan.states = result.states;
  for (const SensorState& s : result.path) {
    plan.psi.push_back(s.psi);
    plan.footprints.push_back(fps.at(s.level, s.psi));
  }
  plan.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return plan;
}

Cost sensor_sequence_cost(const std::vector<Waypoint>& waypoints, const std::vector<int>& psi, int history,
                          const CoverageMap& map, const SensorGeometry& geom, const CostParams& params) {
  if (psi.size() != waypoints.size()) throw std::invalid_argument("one pan bin per waypoint required");
  const FootprintTable fps(waypoints, map, geom);
  Cost total = 0;
  std::vector<std::int8_t> hist;
  for (std::size_t k = 1; k < psi.size(); ++k) {
    hist.push_back(static_cast<std::int8_t>(psi[k - 1]));
    if (static_cast<int>(hist.size()) > history) hist.erase(hist.begin());
    total += tick_cost(fps, static_cast<int>(k), psi[k], hist, map, params);
  }
  return total;
}

// ---------------------------------------------------------------------------

int resolve_psi0(int psi0, const RobotState& start, const LatticeConfig& lattice, const SensorGeometry& geom) {
  if (psi0 >= 0) {
    if (psi0 >= geom.psi_bins) throw std::invalid_argument("initial sensor bin out of range");
    return psi0;
  }
  return geom.nearest_bin(lattice.heading_angle(start.heading));
}

Trajectory assemble_trajectory(const RobotState& start, const std::vector<PrimitiveStep>& chain,
                               const std::vector<int>& psi, const PrimitiveLibrary& lib, const CoverageMap& map,
                               const SensorGeometry& geom) {
  const auto wps = chain_waypoints(start, chain, lib);
  if (wps.size() != psi.size()) throw std::invalid_argument("one pan bin per waypoint required");
  Trajectory traj;
  traj.psi_bins = geom.psi_bins;
  traj.primitives = chain;
  for (const PrimitiveStep& p : chain) traj.motion_cost += lib.at(p.from.heading, p.from.speed, p.primitive).duration;
  traj.steps.reserve(wps.size());
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const Waypoint& w = wps[i];
    TrajectoryStep s{w.t, w.x, w.y, w.theta, w.v, psi[i], {}};
    s.footprint = footprint_cells(map, w.x, w.y, geom.psi_angle(psi[i]), geom, w.theta).cells;
    traj.steps.push_back(std::move(s));
  }
  return traj;
}

SplashResult splash(const RobotState& start, CellIndex goal, int psi0, int history, const CoverageMap& map,
                    const PrimitiveLibrary& lib, const PlannerConfig& config, const RobotSearchLimits& limits) {
  if (history < 0 || history > config.splash.h_max) throw std::invalid_argument("history size out of range");
  SplashResult out;
  const int psi_start = resolve_psi0(psi0 >= 0 ? psi0 : config.splash.psi0, start, lib.config(), config.sensor);

  const auto t0 = Clock::now();
  out.robot = plan_robot(start, goal, map, lib, config.search, limits);
  const auto t1 = Clock::now();
  out.t_robot_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.status = out.robot.status;
  if (!out.robot.found()) return out;

  out.sensor = plan_sensor(out.robot.waypoints, psi_start, history, map, config.sensor, config.cost);
  out.trajectory = assemble_trajectory(start, out.robot.chain, out.sensor.psi, lib, map, config.sensor);
  out.trajectory.sensor_cost = out.sensor.cost;
  out.t_sensor_ms = std::chrono::duration<double, std::milli>(Clock::now() - t1).count();
  return out;
}

}  // namespace covplan
