#pragma once

#include <numbers>
#include <vector>

#include "covplan/coverage_map.hpp"

namespace covplan {

/// Ground projection of the pan-only camera: a rect_length x rect_width
/// rectangle whose center sits `offset` meters from the robot along psi.
/// psi is a global-frame angle discretized into psi_bins equal steps; the
/// sensor pans at most one step per second.
struct SensorGeometry {
  double rect_length = 6.0;
  double rect_width = 4.0;
  double offset = 5.0;
  int psi_bins = 16;

  [[nodiscard]] double psi_step() const noexcept { return 2.0 * std::numbers::pi / psi_bins; }
  [[nodiscard]] double psi_angle(int bin) const noexcept { return psi_step() * bin; }
  [[nodiscard]] int wrap_bin(int bin) const noexcept { return ((bin % psi_bins) + psi_bins) % psi_bins; }
  [[nodiscard]] int nearest_bin(double angle) const noexcept;
  /// Circular bin distance in [0, psi_bins / 2].
  [[nodiscard]] int bin_distance(int a, int b) const noexcept;
  /// Coarse upper bound on |F| for any pose on a grid with the given cell size.
  [[nodiscard]] int max_cells(double cell_size) const noexcept;
  void validate() const;
};

struct Footprint {
  std::vector<CellIndex> cells;  // sorted, unique, in bounds
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double psi = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return cells.size(); }
  [[nodiscard]] bool contains(CellIndex c) const noexcept;
};

/// Cells whose square region overlaps the footprint rectangle with positive
/// area. Cells past the map edge are clipped. Throws MapError when (x, y) is
/// outside the map. theta does not change the geometry (psi is global).
[[nodiscard]] Footprint footprint_cells(const CoverageMap& map, double x, double y, double psi,
                                        const SensorGeometry& geom, double theta = 0.0);

/// Same rasterization without the robot-position precondition; used by the
/// map generator and renderer.
[[nodiscard]] std::vector<CellIndex> rasterize_rectangle(int width, int height, double cell_size, double center_x,
                                                         double center_y, double length, double rect_width,
                                                         double angle);

[[nodiscard]] std::vector<CellIndex> footprint_overlap(const Footprint& a, const Footprint& b);

}  // namespace covplan
