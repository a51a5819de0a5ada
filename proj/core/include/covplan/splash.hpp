#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "covplan/config.hpp"
#include "covplan/costs.hpp"
#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"
#include "covplan/heuristics.hpp"
#include "covplan/lattice.hpp"
#include "covplan/search.hpp"
#include "covplan/state_spaces.hpp"
#include "covplan/trajectory.hpp"

namespace covplan {

/// Robot search key. Time is implied by g (cost = elapsed seconds), so two
/// arrivals at the same spatial state merge and the earlier one wins.
struct SpatialState {
  int cx = 0;
  int cy = 0;
  int heading = 0;
  int speed = 0;

  friend constexpr auto operator<=>(const SpatialState&, const SpatialState&) = default;
};

struct SpatialStateHash {
  std::size_t operator()(const SpatialState& s) const noexcept;
};

struct RobotPlan {
  SearchStatus status = SearchStatus::NoPath;
  RobotState start;
  std::vector<PrimitiveStep> chain;
  std::vector<Waypoint> waypoints;  // 1 s spacing, start included
  int motion_cost = 0;              // seconds
  std::size_t expansions = 0;
  double wall_ms = 0.0;

  [[nodiscard]] bool found() const noexcept { return status == SearchStatus::Found; }
};

struct RobotSearchLimits {
  Clock::time_point deadline = Clock::time_point::max();
  std::size_t max_expansions = std::numeric_limits<std::size_t>::max();
};

/// Speed bound shared by all time heuristics: the fastest endpoint
/// displacement any primitive achieves.
[[nodiscard]] double heuristic_speed(const PrimitiveLibrary& lib);

/// MHA* over lattice nodes minimizing time. Anchor: Euclidean; extra queues:
/// Dubins (free final heading) and 8-connected grid distance. The goal is any
/// node whose cell equals `goal`; nodes later than search.t_max are pruned.
[[nodiscard]] RobotPlan plan_robot(const RobotState& start, CellIndex goal, const CoverageMap& map,
                                   const PrimitiveLibrary& lib, const SearchConfig& search,
                                   const RobotSearchLimits& limits = {});

struct SensorPlan {
  std::vector<int> psi;                  // one bin per waypoint
  std::vector<Footprint> footprints;     // one per waypoint
  Cost cost = 0;                         // unshifted objective (levels 1 .. L-1)
  Cost shifted_cost = 0;                 // search g at the goal
  Cost shift = 0;                        // per-edge offset used
  std::size_t expansions = 0;
  std::size_t states = 0;                // distinct states generated
  double wall_ms = 0.0;
};

/// Tie-break for the sensor search: lower level first, then angles closer to
/// psi0 (current bin, then history entries), then bin order. On a flat cost
/// landscape this keeps the sensor still.
struct SensorLess {
  int psi0 = 0;
  int bins = 16;
  [[nodiscard]] bool operator()(const SensorState& a, const SensorState& b) const noexcept;
};

/// Uninformed A* over the leveled sensor DAG of a fixed robot path, with
/// sensor history H. Optimal for the history-aware objective (H = 0 drops the history terms).
[[nodiscard]] SensorPlan plan_sensor(const std::vector<Waypoint>& waypoints, int psi0, int history,
                                     const CoverageMap& map, const SensorGeometry& geom, const CostParams& params);

/// Objective replay: cost of a fixed pan sequence under history H.
[[nodiscard]] Cost sensor_sequence_cost(const std::vector<Waypoint>& waypoints, const std::vector<int>& psi,
                                        int history, const CoverageMap& map, const SensorGeometry& geom,
                                        const CostParams& params);

struct SplashResult {
  SearchStatus status = SearchStatus::NoPath;
  Trajectory trajectory;
  RobotPlan robot;
  SensorPlan sensor;
  double t_robot_ms = 0.0;
  double t_sensor_ms = 0.0;

  [[nodiscard]] bool found() const noexcept { return status == SearchStatus::Found; }
  [[nodiscard]] double wall_ms() const noexcept { return t_robot_ms + t_sensor_ms; }
};

/// psi0 < 0 selects the bin nearest the start heading.
[[nodiscard]] int resolve_psi0(int psi0, const RobotState& start, const LatticeConfig& lattice,
                               const SensorGeometry& geom);

/// Trajectory from a primitive chain and one pan bin per waypoint; sensor_cost
/// is left for the caller.
[[nodiscard]] Trajectory assemble_trajectory(const RobotState& start, const std::vector<PrimitiveStep>& chain,
                                             const std::vector<int>& psi, const PrimitiveLibrary& lib,
                                             const CoverageMap& map, const SensorGeometry& geom);

/// Decoupled planner: robot path first, then the sensor over that path.
[[nodiscard]] SplashResult splash(const RobotState& start, CellIndex goal, int psi0, int history,
                                  const CoverageMap& map, const PrimitiveLibrary& lib, const PlannerConfig& config,
                                  const RobotSearchLimits& limits = {});

}  // namespace covplan
