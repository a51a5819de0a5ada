#include "covplan/split.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace covplan {

namespace {

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

RobotState lattice_state_at(const TrajectoryStep& step, const LatticeConfig& cfg) {
  RobotState r;
  r.cx = static_cast<int>(std::floor(step.x / cfg.cell_size));
  r.cy = static_cast<int>(std::floor(step.y / cfg.cell_size));
  const double turns = step.theta / (2.0 * std::numbers::pi / cfg.n_theta);
  r.heading = static_cast<int>(((std::lround(turns) % cfg.n_theta) + cfg.n_theta) % cfg.n_theta);
  const auto it = std::find_if(cfg.speeds.begin(), cfg.speeds.end(),
                               [&](double v) { return std::abs(v - step.v) < 1e-9; });
  if (it == cfg.speeds.end()) throw std::invalid_argument("trajectory start speed is not a lattice speed");
  r.speed = static_cast<int>(it - cfg.speeds.begin());
  r.t = step.t;
  return r;
}

}  // namespace

JointPath joint_path_from_trajectory(const Trajectory& traj, const JointSpace& space) {
  JointPath path;
  if (traj.empty()) return path;
  const PrimitiveLibrary& lib = space.library();
  const RobotState start = traj.primitives.empty() ? lattice_state_at(traj.steps.front(), lib.config())
                                                   : traj.primitives.front().from;
  std::size_t idx = 0;
  auto psi_at = [&](std::size_t i) {
    if (i >= traj.steps.size()) throw std::invalid_argument("trajectory has fewer steps than its primitives imply");
    return traj.steps[i].psi;
  };
  path.states.push_back(space.start(start, psi_at(idx++)));
  RobotState at = start;
  for (const PrimitiveStep& step : traj.primitives) {
    if (step.from != at) throw std::invalid_argument("primitive chain is not contiguous");
    const MotionPrimitive& p = lib.at(at.heading, at.speed, step.primitive);
    for (int tick = 1; tick < p.duration; ++tick) {
      JointState s;
      s.anchor = at;
      s.primitive = static_cast<std::int16_t>(p.id);
      s.tick = static_cast<std::int8_t>(tick);
      s.psi = static_cast<std::int8_t>(psi_at(idx++));
      path.states.push_back(s);
    }
    at = {at.cx + p.dx, at.cy + p.dy, p.end_heading, p.end_speed, at.t + p.duration};
    path.states.push_back(space.start(at, psi_at(idx++)));
  }
  if (idx != traj.steps.size()) throw std::invalid_argument("trajectory has more steps than its primitives imply");
  price_joint_path(path, space);
  return path;
}

void price_joint_path(JointPath& path, const JointSpace& space) {
  path.cost = 0;
  path.coverage_cost = 0;
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    const Cost c = space.coverage_cost(path.states[i]);
    path.coverage_cost += c;
    path.cost += space.edge_cost(c);
  }
}

Trajectory trajectory_from_joint_path(const JointPath& path, const JointSpace& space) {
  if (path.empty()) return {};
  const PrimitiveLibrary& lib = space.library();
  if (!path.states.front().at_lattice()) throw std::invalid_argument("joint path must start at a lattice node");
  std::vector<PrimitiveStep> chain;
  std::vector<int> psi;
  psi.push_back(path.states.front().psi);
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    const JointState& prev = path.states[i - 1];
    const JointState& cur = path.states[i];
    psi.push_back(cur.psi);
    if (prev.at_lattice()) {
      if (!cur.at_lattice()) {
        chain.push_back({prev.anchor, cur.primitive});
        continue;
      }
      // Single-tick primitive: recover it from the endpoint.
      const auto& bucket = lib.from(prev.anchor.heading, prev.anchor.speed);
      const auto it = std::find_if(bucket.begin(), bucket.end(), [&](const MotionPrimitive& p) {
        return prev.anchor.cx + p.dx == cur.anchor.cx && prev.anchor.cy + p.dy == cur.anchor.cy &&
               p.end_heading == cur.anchor.heading && p.end_speed == cur.anchor.speed;
      });
      if (it == bucket.end()) throw std::logic_error("joint path step matches no primitive");
      chain.push_back({prev.anchor, it->id});
    }
  }
  Trajectory traj = assemble_trajectory(path.states.front().anchor, chain, psi, lib, space.map(), space.geometry());
  traj.sensor_cost = path.coverage_cost;
  return traj;
}

// ---------------------------------------------------------------------------

TunnelResult tunnel_astar(const JointPath& reference, LevelTable& levels, const JointSpace& space,
                          const TunnelOptions& options) {
  if (reference.empty()) throw std::invalid_argument("tunnel search needs a reference path");
  const auto t0 = Clock::now();
  TunnelResult result;
  const JointState& start = reference.states.front();
  const JointState& last = reference.states.back();
  const CellIndex goal_cell = last.anchor.cell();
  auto is_goal = [&](const JointState& s) {
    if (options.strict_goal) return s == last;
    return s.at_lattice() && s.anchor.cell() == goal_cell;
  };

  detail::BestFirstTable<JointState, JointStateHash, std::less<JointState>> table;
  bool fresh = false;
  const std::uint32_t s0 = table.touch(start, fresh);
  table.node(s0).g = 0;
  table.push(s0, 0);
  levels.try_emplace(start, 0);
  result.tunnel_states = 1;

  std::vector<Successor<JointState>> succ;
  std::uint32_t idx = 0;
  while (table.pop(idx)) {
    if (result.expansions % detail::kClockStride == 0 &&
        (Clock::now() >= options.deadline || table.size() >= options.max_nodes ||
         levels.size() >= options.max_nodes)) {
      result.status = SearchStatus::Timeout;
      break;
    }
    auto& n = table.node(idx);
    if (is_goal(n.state)) {
      result.status = SearchStatus::Found;
      result.path.states = table.backtrack(idx);
      result.path.cost = n.g;
      break;
    }
    n.closed = true;
    ++result.expansions;
    const Cost g = n.g;
    const JointState current = n.state;
    const int level = levels.at(current);
    if (level > options.iteration) ++result.level_violations;
    result.max_expanded_level = std::max(result.max_expanded_level, level);

    succ.clear();
    space.expand(current, succ);
    for (const auto& s : succ) {
      ++result.generated;
      auto [it, inserted] = levels.try_emplace(s.state, level + 1);
      if (!inserted && it->second > level + 1) it->second = level + 1;
      if (it->second > options.iteration) {
        ++result.gated_out;
        continue;
      }
      const std::uint32_t j = table.touch(s.state, fresh);
      auto& m = table.node(j);
      if (m.closed) continue;
      if (g + s.cost < m.g) {
        if (m.g == std::numeric_limits<Cost>::max()) ++result.tunnel_states;
        m.g = g + s.cost;
        m.parent = idx;
        table.push(j, m.g);
      }
    }
  }
  if (result.status == SearchStatus::Found) price_joint_path(result.path, space);
  result.wall_ms = elapsed_ms(t0);
  return result;
}

void write_trace_csv(std::ostream& out, const RefinementTrace& trace) {
  out << "iteration,cost,expansions,wall_ms,tunnel_states\n";
  for (const TraceRow& r : trace.rows) {
    out << r.iteration << ',' << to_units(r.cost) << ',' << r.expansions << ',' << r.wall_ms << ',' << r.tunnel_states
        << '\n';
  }
}

RefineResult local_iterative_tunneling(const JointPath& initial, const JointSpace& space, const RefineLimits& limits) {
  RefineResult out;
  out.best = initial;
  out.trace.shift = space.shift();
  if (initial.empty()) return out;

  LevelTable levels;
  auto seed = [&](const JointPath& p) {
    for (const JointState& s : p.states) levels[s] = 0;
  };
  seed(initial);

  for (int iteration = 1;; ++iteration) {
    if (limits.max_iterations > 0 && iteration > limits.max_iterations) break;
    if (Clock::now() >= limits.deadline) break;
    TunnelOptions opts;
    opts.iteration = iteration;
    opts.deadline = limits.deadline;
    opts.max_nodes = limits.max_nodes;
    opts.strict_goal = limits.strict_goal;
    const TunnelResult r = tunnel_astar(initial, levels, space, opts);
    // An interrupted iteration never reports a result.
    if (r.status == SearchStatus::Timeout) break;
    if (r.status == SearchStatus::Found && r.path.cost < out.best.cost) {
      out.best = r.path;
      if (limits.reanchor) seed(out.best);
    }
    TraceRow row;
    row.iteration = iteration;
    row.cost = out.best.cost;
    row.iteration_cost = r.status == SearchStatus::Found ? r.path.cost : std::numeric_limits<Cost>::max();
    row.coverage_cost = out.best.coverage_cost;
    row.expansions = r.expansions;
    row.wall_ms = r.wall_ms;
    row.tunnel_states = r.tunnel_states;
    row.gated_out = r.gated_out;
    row.level_violations = r.level_violations;
    out.trace.rows.push_back(row);
    if (r.gated_out == 0) {
      out.trace.converged = true;
      break;
    }
  }
  return out;
}

SplitResult split(const RobotState& start, CellIndex goal, int psi0, const CoverageMap& map,
                  const PrimitiveLibrary& lib, const PlannerConfig& config, const SplitLimits& limits) {
  if (config.split.joint_history != 0) throw std::invalid_argument("sensor history inside refinement is not supported");
  const auto t0 = Clock::now();
  const bool bounded = limits.budget_s > 0.0;
  const Clock::time_point deadline =
      bounded ? t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(limits.budget_s))
              : Clock::time_point::max();

  SplitResult out;
  RobotSearchLimits robot_limits;
  robot_limits.deadline = deadline;
  const SplashResult init = splash(start, goal, psi0, 0, map, lib, config, robot_limits);
  out.t_splash_ms = elapsed_ms(t0);
  out.status = init.status;
  out.expansions = init.robot.expansions + init.sensor.expansions;
  if (!init.found()) {
    out.wall_ms = elapsed_ms(t0);
    return out;
  }
  out.initial = init.trajectory;

  const JointSpace space(map, lib, config.sensor, config.cost, EdgeMode::Refinement, config.search.t_max,
                         coverage_cost_shift(map, config.sensor, config.cost));
  const JointPath initial = joint_path_from_trajectory(init.trajectory, space);
  out.initial_cost = initial.cost;
  out.final_cost = initial.cost;
  out.trajectory = init.trajectory;
  out.trace.shift = space.shift();
  if (Clock::now() >= deadline) {
    out.wall_ms = elapsed_ms(t0);
    return out;
  }

  RefineLimits refine;
  refine.deadline = deadline;
  refine.max_iterations = limits.max_iterations;
  refine.max_nodes = config.split.max_nodes;
  refine.reanchor = config.split.reanchor;
  refine.strict_goal = config.split.strict_goal;
  const RefineResult r = local_iterative_tunneling(initial, space, refine);
  out.trace = r.trace;
  out.final_cost = r.best.cost;
  out.trajectory = trajectory_from_joint_path(r.best, space);
  for (const TraceRow& row : r.trace.rows) out.expansions += row.expansions;
  out.wall_ms = elapsed_ms(t0);
  return out;
}

// ---------------------------------------------------------------------------

BaselineResult joint_baseline(const RobotState& start, CellIndex goal, int psi0, const CoverageMap& map,
                              const PrimitiveLibrary& lib, const PlannerConfig& config, const BaselineLimits& limits) {
  const auto t0 = Clock::now();
  const GoalCell g = make_goal(map, goal);
  const LatticeConfig& cfg = lib.config();
  const double cs = cfg.cell_size;
  const JointSpace space(map, lib, config.sensor, config.cost, EdgeMode::Baseline, config.search.t_max,
                         coverage_cost_shift(map, config.sensor, config.cost));
  const int psi_start = resolve_psi0(psi0 >= 0 ? psi0 : config.splash.psi0, start, cfg, config.sensor);
  const double v = heuristic_speed(lib);
  // Every tick costs at least w_motion + w_sensor * lambda.
  const double per_tick = config.cost.w_motion + config.cost.w_sensor * config.cost.lambda;
  const DijkstraField field(map, goal);

  // Remaining ticks of the committed primitive plus a time bound from its endpoint.
  auto bound = [&](const JointState& s, auto&& seconds_from) -> Cost {
    RobotState end = s.anchor;
    int remaining = 0;
    if (!s.at_lattice()) {
      const MotionPrimitive& p = lib.at(s.anchor.heading, s.anchor.speed, s.primitive);
      end = {s.anchor.cx + p.dx, s.anchor.cy + p.dy, p.end_heading, p.end_speed, s.anchor.t + p.duration};
      remaining = p.duration - s.tick;
    }
    const double secs = seconds_from(end);
    if (!std::isfinite(secs)) return std::numeric_limits<Cost>::max() / 4;
    return static_cast<Cost>(std::floor((remaining + secs) * per_tick * static_cast<double>(kCostScale)));
  };
  auto h_anchor = [&](const JointState& s) {
    return bound(s, [&](const RobotState& r) { return h_euclidean(r.x(cs), r.y(cs), g, v); });
  };
  std::vector<std::function<Cost(const JointState&)>> extra;
  extra.emplace_back([&](const JointState& s) {
    return bound(s, [&](const RobotState& r) {
      return dubins_length_free_heading(r.x(cs), r.y(cs), cfg.heading_angle(r.heading), g.x, g.y,
                                        config.search.r_min, config.search.dubins_headings) /
             v;
    });
  });
  extra.emplace_back([&](const JointState& s) {
    return bound(s, [&](const RobotState& r) { return h_dijkstra(field, r.cell(), v); });
  });

  auto is_goal = [&](const JointState& s) { return s.at_lattice() && s.anchor.cell() == goal; };
  auto expand = [&](const JointState& s, std::vector<Successor<JointState>>& out) { space.expand(s, out); };

  SearchOptions<JointState> options;
  if (limits.timeout_s > 0.0) {
    options.deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(limits.timeout_s));
  }
  options.max_expansions = limits.max_expansions;
  options.max_nodes = config.baseline.max_nodes;

  const auto r = mhastar<JointState, JointStateHash>(space.start(start, psi_start), is_goal, expand, h_anchor, extra,
                                                     config.search.w1, config.search.w2, options);
  BaselineResult out;
  out.status = r.status;
  out.expansions = r.expansions;
  if (r.found()) {
    JointPath path{r.path, 0, 0};
    price_joint_path(path, space);
    out.cost = path.cost;
    out.trajectory = trajectory_from_joint_path(path, space);
  }
  out.wall_ms = elapsed_ms(t0);
  return out;
}

}  // namespace covplan
