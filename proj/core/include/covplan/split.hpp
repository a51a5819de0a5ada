#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "covplan/config.hpp"
#include "covplan/search.hpp"
#include "covplan/splash.hpp"
#include "covplan/state_spaces.hpp"
#include "covplan/trajectory.hpp"

namespace covplan {

/// Tunnel distance of every joint state touched so far. Reference-path states
/// sit at 0; others keep the smallest level(parent) + 1 seen.
using LevelTable = std::unordered_map<JointState, int, JointStateHash>;

struct JointPath {
  std::vector<JointState> states;
  Cost cost = 0;           // search cost (shifted, mode-weighted)
  Cost coverage_cost = 0;  // unshifted history-free coverage sum over states after the first

  [[nodiscard]] bool empty() const noexcept { return states.empty(); }
};

/// Joint states visited by a trajectory, one per second.
[[nodiscard]] JointPath joint_path_from_trajectory(const Trajectory& traj, const JointSpace& space);
/// Trajectory for a joint path starting at a lattice node.
[[nodiscard]] Trajectory trajectory_from_joint_path(const JointPath& path, const JointSpace& space);
/// Fills cost and coverage_cost from the space's edge costs.
void price_joint_path(JointPath& path, const JointSpace& space);

struct TunnelOptions {
  int iteration = 1;
  Clock::time_point deadline = Clock::time_point::max();
  std::size_t max_nodes = 6'000'000;
  bool strict_goal = false;
};

struct TunnelResult {
  SearchStatus status = SearchStatus::NoPath;
  JointPath path;
  std::size_t expansions = 0;
  std::size_t generated = 0;
  std::size_t gated_out = 0;         // successors refused by the level gate
  std::size_t level_violations = 0;  // expanded states with level > iteration (must stay 0)
  std::size_t tunnel_states = 0;     // states admitted to OPEN
  int max_expanded_level = 0;
  double wall_ms = 0.0;
};

/// One refinement search: uninformed A* from the reference start, admitting a
/// successor only when its recorded level is at most options.iteration.
/// The goal is any lattice node in the reference goal cell (or exactly the
/// reference's last state under strict_goal).
[[nodiscard]] TunnelResult tunnel_astar(const JointPath& reference, LevelTable& levels, const JointSpace& space,
                                        const TunnelOptions& options);

struct TraceRow {
  int iteration = 0;
  Cost cost = 0;            // best-so-far search cost
  Cost iteration_cost = 0;  // this iteration's own result (max when none)
  Cost coverage_cost = 0;   // best-so-far unshifted history-free coverage cost
  std::size_t expansions = 0;
  double wall_ms = 0.0;
  std::size_t tunnel_states = 0;
  std::size_t gated_out = 0;
  std::size_t level_violations = 0;
};

struct RefinementTrace {
  std::vector<TraceRow> rows;
  Cost shift = 0;  // per-tick offset added to every refinement edge
  bool converged = false;
};

/// `iteration,cost,expansions,wall_ms,tunnel_states` with costs in priority units.
void write_trace_csv(std::ostream& out, const RefinementTrace& trace);

struct RefineLimits {
  Clock::time_point deadline = Clock::time_point::max();
  int max_iterations = 0;  // 0: unlimited
  std::size_t max_nodes = 6'000'000;
  bool reanchor = false;
  bool strict_goal = false;
};

struct RefineResult {
  JointPath best;
  RefinementTrace trace;
};

/// Iterative tunneling around `initial`; keeps the best path found so far.
[[nodiscard]] RefineResult local_iterative_tunneling(const JointPath& initial, const JointSpace& space,
                                                     const RefineLimits& limits);

struct SplitResult {
  SearchStatus status = SearchStatus::NoPath;
  Trajectory trajectory;  // sensor_cost holds the unshifted history-free coverage sum
  Trajectory initial;
  RefinementTrace trace;
  Cost initial_cost = 0;  // refinement cost of the initial path
  Cost final_cost = 0;
  double t_splash_ms = 0.0;
  double wall_ms = 0.0;
  std::size_t expansions = 0;  // robot + sensor + refinement

  [[nodiscard]] bool found() const noexcept { return status == SearchStatus::Found; }
};

struct SplitLimits {
  double budget_s = 30.0;  // <= 0: unlimited
  int max_iterations = 0;  // 0: unlimited
};

/// Decoupled initialization with H = 0, then refinement with what is left of
/// the budget.
[[nodiscard]] SplitResult split(const RobotState& start, CellIndex goal, int psi0, const CoverageMap& map,
                                const PrimitiveLibrary& lib, const PlannerConfig& config, const SplitLimits& limits);

struct BaselineResult {
  SearchStatus status = SearchStatus::NoPath;
  Trajectory trajectory;  // sensor_cost holds the unshifted history-free coverage sum
  Cost cost = 0;
  std::size_t expansions = 0;
  double wall_ms = 0.0;

  [[nodiscard]] bool found() const noexcept { return status == SearchStatus::Found; }
};

struct BaselineLimits {
  double timeout_s = 20.0;  // <= 0: unlimited
  std::size_t max_expansions = std::numeric_limits<std::size_t>::max();
};

/// MHA* directly in the joint space with edge cost
/// w_motion * seconds + w_sensor * shifted coverage cost.
[[nodiscard]] BaselineResult joint_baseline(const RobotState& start, CellIndex goal, int psi0,
                                            const CoverageMap& map, const PrimitiveLibrary& lib,
                                            const PlannerConfig& config, const BaselineLimits& limits);

}  // namespace covplan
