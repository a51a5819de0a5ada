#pragma once

#include <string>
#include <vector>

#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"
#include "covplan/trajectory.hpp"

namespace covplan {

/// Cells sensed again within `window` steps: the union over k of
/// F_k intersected with F_{k-1} ... F_{k-window}.
[[nodiscard]] std::vector<CellIndex> overlap_cells(const Trajectory& traj, int window);

struct RenderOptions {
  double pixels_per_meter = 6.0;
  int overlap_window = 1;
  bool draw_footprints = true;
};

/// Static SVG: priority heat layer, no-coverage cells, footprint outlines,
/// overlap shading and the robot path. Output is a pure function of inputs.
[[nodiscard]] std::string render_svg(const CoverageMap& map, const Trajectory& traj, const SensorGeometry& geom,
                                     const RenderOptions& options = {});

}  // namespace covplan
