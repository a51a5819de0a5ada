#include "covplan/costs.hpp"

#include <algorithm>

namespace covplan {

void CostParams::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(w_motion >= 0.0) || !(w_sensor >= 0.0)) throw std::invalid_argument("cost weights must be non-negative");
  if (w_motion == 0.0 && w_sensor == 0.0) throw std::invalid_argument("cost weights must not both be zero");
}

Cost cost_no_history(const Footprint& fp, const CoverageMap& map, const CostParams& params) {
  return footprint_cost(fp.cells, map, params.lambda, [](CellIndex) { return false; });
}

Cost cost_with_history(const Footprint& fp, std::span<const CellIndex> hist_cells, const CoverageMap& map,
                       const CostParams& params) {
  return footprint_cost(fp.cells, map, params.lambda, [&](CellIndex c) {
    return std::binary_search(hist_cells.begin(), hist_cells.end(), c);
  });
}

Cost coverage_cost_shift(const CoverageMap& map, const SensorGeometry& geom, const CostParams& params) {
  const Cost worst = static_cast<Cost>(geom.max_cells(map.cell_size())) * std::max(0, -map.min_priority());
  return worst * kCostScale + from_units(params.lambda);
}

Cost edge_cost_joint(Cost tick_coverage_cost, const CostParams& params, EdgeMode mode) {
  switch (mode) {
    case EdgeMode::Refinement:
      return tick_coverage_cost;
    case EdgeMode::Baseline:
      return from_units(params.w_motion) + static_cast<Cost>(std::llround(params.w_sensor *
                                                                          static_cast<double>(tick_coverage_cost)));
  }
  throw std::invalid_argument("unknown edge cost mode");
}

}  // namespace covplan
