#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"

namespace covplan {

/// Fixed-point cost: kCostScale units per priority unit (or per second of
/// motion). Integer accumulation keeps path sums exact and order independent.
using Cost = std::int64_t;
inline constexpr Cost kCostScale = 1'000'000;

[[nodiscard]] constexpr double to_units(Cost c) noexcept { return static_cast<double>(c) / kCostScale; }
[[nodiscard]] inline Cost from_units(double v) noexcept { return static_cast<Cost>(std::llround(v * kCostScale)); }

struct CostParams {
  double lambda = 100.0;  // no-coverage penalty weight
  double w_motion = 1.0;  // joint baseline: weight on seconds of motion
  double w_sensor = 1.0;  // joint baseline: weight on coverage cost

  void validate() const;
};

/// Coverage cost of a footprint. Coverage cells contribute l_i when
/// in_history(cell) holds and p_i otherwise; no-coverage cells add
/// lambda * N_NC / |F| once. An empty footprint costs 0.
template <typename InHistory>
[[nodiscard]] Cost footprint_cost(std::span<const CellIndex> cells, const CoverageMap& map, double lambda,
                                  InHistory&& in_history) {
  if (cells.empty()) return 0;
  std::int64_t priority_sum = 0;
  std::int64_t no_coverage = 0;
  for (CellIndex c : cells) {
    const CellState& s = map.cell(c);
    if (s.zone == Zone::NoCoverage) {
      ++no_coverage;
    } else if (in_history(c)) {
      priority_sum += s.lifetime;
    } else {
      priority_sum += s.lifetime - s.age;
    }
  }
  const double penalty = lambda * static_cast<double>(kCostScale) * static_cast<double>(no_coverage) /
                         static_cast<double>(cells.size());
  return priority_sum * kCostScale + static_cast<Cost>(std::llround(penalty));
}

/// Cost without sensor history.
[[nodiscard]] Cost cost_no_history(const Footprint& fp, const CoverageMap& map, const CostParams& params);

/// Cost with sensor history. hist_cells must be sorted (as produced by history_cells).
[[nodiscard]] Cost cost_with_history(const Footprint& fp, std::span<const CellIndex> hist_cells, const CoverageMap& map,
                                     const CostParams& params);

/// Per-tick offset that makes every footprint cost non-negative on this map:
/// |F|max * max(0, -p_min) + lambda. Every shifted tick costs at least lambda.
[[nodiscard]] Cost coverage_cost_shift(const CoverageMap& map, const SensorGeometry& geom, const CostParams& params);

enum class EdgeMode { Refinement, Baseline };

/// Cost of one joint-space tick. Refinement edges carry only the coverage
/// cost; baseline edges add w_motion * (one second of motion).
[[nodiscard]] Cost edge_cost_joint(Cost tick_coverage_cost, const CostParams& params, EdgeMode mode);

}  // namespace covplan
