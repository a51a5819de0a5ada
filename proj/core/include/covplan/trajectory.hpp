#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "covplan/costs.hpp"
#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"
#include "covplan/lattice.hpp"

namespace covplan {

struct TrajectoryStep {
  int t = 0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  int psi = 0;  // bin
  std::vector<CellIndex> footprint;
};

struct PrimitiveStep {
  RobotState from;
  int primitive = 0;  // id within from's (heading, speed) bucket
};

/// Timestamped joint plan at 1 s resolution. The first step is the start
/// configuration; sensor_cost sums the (unshifted) coverage cost of every
/// later step under the planner's own objective.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::vector<PrimitiveStep> primitives;
  int psi_bins = 16;
  double motion_cost = 0.0;  // seconds
  Cost sensor_cost = 0;

  [[nodiscard]] bool empty() const noexcept { return steps.empty(); }
};

/// Per-second robot waypoints along a primitive chain, including the start.
/// Primitive endpoints are reported at the exact lattice node.
[[nodiscard]] std::vector<Waypoint> chain_waypoints(const RobotState& start, const std::vector<PrimitiveStep>& chain,
                                                    const PrimitiveLibrary& lib);

/// Invariant replay: unit time steps, pan rate, footprint regeneration and
/// primitive continuity. Returns human-readable violations (empty when valid).
[[nodiscard]] std::vector<std::string> trajectory_violations(const Trajectory& traj, const CoverageMap& map,
                                                             const SensorGeometry& geom,
                                                             const PrimitiveLibrary* lib = nullptr);

// `traj v1` text format.
void write_trajectory(std::ostream& out, const Trajectory& traj);
[[nodiscard]] Trajectory read_trajectory(std::istream& in);
[[nodiscard]] Trajectory load_trajectory(const std::string& path);
void save_trajectory(const std::string& path, const Trajectory& traj);

}  // namespace covplan
