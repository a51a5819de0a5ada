#include "covplan/footprint.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace covplan {

int SensorGeometry::nearest_bin(double angle) const noexcept {
  const double turns = angle / psi_step();
  return wrap_bin(static_cast<int>(std::llround(turns)));
}

int SensorGeometry::bin_distance(int a, int b) const noexcept {
  const int d = wrap_bin(a - b);
  return std::min(d, psi_bins - d);
}

int SensorGeometry::max_cells(double cell_size) const noexcept {
  const auto along = static_cast<int>(std::ceil(rect_length / cell_size + 1.0));
  const auto across = static_cast<int>(std::ceil(rect_width / cell_size + 1.0));
  return along * across * 2;
}

void SensorGeometry::validate() const {
  if (!(rect_length > 0.0) || !(rect_width > 0.0) || !(offset >= 0.0)) {
    throw std::invalid_argument("sensor rectangle dimensions must be positive");
  }
  if (psi_bins < 3 || psi_bins > 32) throw std::invalid_argument("psi_bins must be in [3, 32]");
}

bool Footprint::contains(CellIndex c) const noexcept { return std::binary_search(cells.begin(), cells.end(), c); }

std::vector<CellIndex> rasterize_rectangle(int width, int height, double cell_size, double center_x, double center_y,
                                           double length, double rect_width, double angle) {
  const double ux = std::cos(angle);
  const double uy = std::sin(angle);
  const double half_len = 0.5 * length;
  const double half_wid = 0.5 * rect_width;
  const double ext_x = half_len * std::abs(ux) + half_wid * std::abs(uy);
  const double ext_y = half_len * std::abs(uy) + half_wid * std::abs(ux);
  // Positive-area overlap: shared edges and corners do not count.
  const double eps = 1e-9 * cell_size;
  const double half_cell = 0.5 * cell_size;
  const double cell_extent_u = half_cell * (std::abs(ux) + std::abs(uy));

  const int col_lo = std::max(0, static_cast<int>(std::floor((center_x - ext_x) / cell_size)));
  const int col_hi = std::min(width - 1, static_cast<int>(std::floor((center_x + ext_x) / cell_size)));
  const int row_lo = std::max(0, static_cast<int>(std::floor((center_y - ext_y) / cell_size)));
  const int row_hi = std::min(height - 1, static_cast<int>(std::floor((center_y + ext_y) / cell_size)));

  auto overlaps = [eps](double lo_a, double hi_a, double lo_b, double hi_b) {
    return std::min(hi_a, hi_b) - std::max(lo_a, lo_b) > eps;
  };

  std::vector<CellIndex> cells;
  for (int r = row_lo; r <= row_hi; ++r) {
    const double y0 = r * cell_size;
    if (!overlaps(y0, y0 + cell_size, center_y - ext_y, center_y + ext_y)) continue;
    for (int c = col_lo; c <= col_hi; ++c) {
      const double x0 = c * cell_size;
      if (!overlaps(x0, x0 + cell_size, center_x - ext_x, center_x + ext_x)) continue;
      const double dx = x0 + half_cell - center_x;
      const double dy = y0 + half_cell - center_y;
      const double along = dx * ux + dy * uy;
      const double across = -dx * uy + dy * ux;
      if (!overlaps(along - cell_extent_u, along + cell_extent_u, -half_len, half_len)) continue;
      if (!overlaps(across - cell_extent_u, across + cell_extent_u, -half_wid, half_wid)) continue;
      cells.push_back({r, c});
    }
  }
  return cells;  // row-major order is already sorted
}

Footprint footprint_cells(const CoverageMap& map, double x, double y, double psi, const SensorGeometry& geom,
                          double theta) {
  if (!map.contains_point(x, y)) {
    throw MapError("footprint requested for robot position (" + std::to_string(x) + ", " + std::to_string(y) +
                   ") outside the map");
  }
  Footprint fp;
  fp.x = x;
  fp.y = y;
  fp.theta = theta;
  fp.psi = psi;
  fp.cells = rasterize_rectangle(map.width(), map.height(), map.cell_size(), x + geom.offset * std::cos(psi),
                                 y + geom.offset * std::sin(psi), geom.rect_length, geom.rect_width, psi);
  return fp;
}

std::vector<CellIndex> footprint_overlap(const Footprint& a, const Footprint& b) {
  std::vector<CellIndex> out;
  std::set_intersection(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(), std::back_inserter(out));
  return out;
}

}  // namespace covplan
