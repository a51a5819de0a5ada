#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

#include "covplan/costs.hpp"
#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"
#include "covplan/lattice.hpp"
#include "covplan/search.hpp"

namespace covplan {

// ---------------------------------------------------------------------------
// Sensor space: a leveled DAG over the 1 s waypoints of a fixed robot path.

inline constexpr int kMaxHistory = 8;

struct SensorState {
  int level = 0;  // waypoint index
  int psi = 0;    // bin
  std::uint8_t history_size = 0;
  std::array<std::int8_t, kMaxHistory> history{};  // oldest first; unused slots stay 0

  [[nodiscard]] std::span<const std::int8_t> recent() const noexcept { return {history.data(), history_size}; }

  friend constexpr auto operator<=>(const SensorState&, const SensorState&) = default;
};

struct SensorStateHash {
  std::size_t operator()(const SensorState& s) const noexcept;
};

struct SensorPlanProblem {
  std::vector<Waypoint> waypoints;  // 1 s spacing
  int psi0 = 0;
  int history = 0;  // H

  [[nodiscard]] int last_level() const noexcept { return static_cast<int>(waypoints.size()) - 1; }
  void validate(const SensorGeometry& geom) const;
};

[[nodiscard]] SensorState sensor_start(const SensorPlanProblem& problem);

/// psi - step, psi, psi + step at the next level (wrapped); each child's
/// history is the last H entries of (history ++ [psi]).
[[nodiscard]] std::vector<SensorState> sensor_successors(const SensorState& s, const SensorPlanProblem& problem,
                                                         const SensorGeometry& geom);

/// Duplicate-detection key: (level, psi, history). States merge iff equal.
[[nodiscard]] inline const SensorState& sensor_state_key(const SensorState& s) noexcept { return s; }

/// Union of the footprints recorded in s's history (sorted).
[[nodiscard]] std::vector<CellIndex> history_cells(const SensorPlanProblem& problem, const SensorState& s,
                                                   const SensorGeometry& geom, const CoverageMap& map);

// ---------------------------------------------------------------------------
// Joint space: robot lattice x sensor angle, expanded one second at a time.

/// Either a lattice node (primitive < 0, tick 0) or a 1 s sub-state inside
/// the primitive committed at `anchor`.
struct JointState {
  RobotState anchor;
  std::int16_t primitive = -1;
  std::int8_t tick = 0;
  std::int8_t psi = 0;

  [[nodiscard]] bool at_lattice() const noexcept { return primitive < 0; }
  [[nodiscard]] int time() const noexcept { return anchor.t + tick; }

  friend constexpr auto operator<=>(const JointState&, const JointState&) = default;
};

/// Packs (x cell, y cell, theta bin, v level, t, primitive, tick, psi bin).
[[nodiscard]] std::uint64_t joint_state_key(const JointState& s);

struct JointStateHash {
  std::size_t operator()(const JointState& s) const noexcept;
};

struct JointEdge {
  JointState to;
  Footprint footprint;
  Cost coverage_cost = 0;  // unshifted, history-free
  Cost cost = 0;           // search edge cost (shifted, mode-weighted)
  const MotionPrimitive* primitive = nullptr;
};

class JointSpace {
 public:
  JointSpace(const CoverageMap& map, const PrimitiveLibrary& lib, const SensorGeometry& geom, CostParams params,
             EdgeMode mode, int t_max, Cost shift);

  [[nodiscard]] const CoverageMap& map() const noexcept { return *map_; }
  [[nodiscard]] const PrimitiveLibrary& library() const noexcept { return *lib_; }
  [[nodiscard]] const SensorGeometry& geometry() const noexcept { return geom_; }
  [[nodiscard]] const CostParams& params() const noexcept { return params_; }
  [[nodiscard]] EdgeMode mode() const noexcept { return mode_; }
  [[nodiscard]] int t_max() const noexcept { return t_max_; }
  [[nodiscard]] Cost shift() const noexcept { return shift_; }

  [[nodiscard]] JointState start(const RobotState& robot, int psi) const;
  [[nodiscard]] Waypoint pose(const JointState& s) const;
  [[nodiscard]] Footprint footprint(const JointState& s) const;
  /// Unshifted history-free cost of s's footprint.
  [[nodiscard]] Cost coverage_cost(const JointState& s) const;
  [[nodiscard]] Cost edge_cost(Cost coverage_cost) const;
  [[nodiscard]] const MotionPrimitive* primitive(const JointState& s) const;

  /// Lean expansion used by searches.
  void expand(const JointState& s, std::vector<Successor<JointState>>& out) const;
  /// Expansion with the edge's footprint exposed.
  [[nodiscard]] std::vector<JointEdge> joint_successors(const JointState& s) const;

 private:
  template <typename Emit>
  void for_each_successor(const JointState& s, Emit&& emit) const;

  const CoverageMap* map_;
  const PrimitiveLibrary* lib_;
  SensorGeometry geom_;
  CostParams params_;
  EdgeMode mode_;
  int t_max_;
  Cost shift_;
};

}  // namespace covplan
