#include "covplan/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace covplan {

std::vector<CellIndex> overlap_cells(const Trajectory& traj, int window) {
  std::vector<CellIndex> out;
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    const auto& cur = traj.steps[k].footprint;
    for (int j = 1; j <= window && static_cast<std::size_t>(j) <= k; ++j) {
      const auto& prev = traj.steps[k - static_cast<std::size_t>(j)].footprint;
      std::set_intersection(cur.begin(), cur.end(), prev.begin(), prev.end(), std::back_inserter(out));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Red (urgent) through yellow to green (fresh).
std::string heat(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(u < 0.5 ? 220 : 220 - (u - 0.5) * 2 * 170));
  const int g = static_cast<int>(std::lround(u < 0.5 ? 60 + u * 2 * 150 : 210));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x50", r, g);
  return buf;
}

}  // namespace

std::string render_svg(const CoverageMap& map, const Trajectory& traj, const SensorGeometry& geom,
                       const RenderOptions& options) {
  const double s = options.pixels_per_meter;
  const double cs = map.cell_size();
  const double w = map.width() * cs * s;
  const double h = map.height() * cs * s;
  auto px = [&](double x) { return num(x * s); };
  auto py = [&](double y) { return num(h - y * s); };  // y grows upward on the map

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";

  int lo = 0, hi = 1;
  bool any = false;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (!map.in_coverage_zone({r, c})) continue;
      const int p = map.priority({r, c});
      lo = any ? std::min(lo, p) : p;
      hi = any ? std::max(hi, p) : p;
      any = true;
    }
  }
  const double span = std::max(1, hi - lo);

  out << "<g id=\"heat\" stroke=\"none\">\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const std::string fill =
          map.in_coverage_zone({r, c}) ? heat((map.priority({r, c}) - lo) / span) : std::string("#404040");
      out << "<rect x=\"" << px(c * cs) << "\" y=\"" << py((r + 1) * cs) << "\" width=\"" << num(cs * s)
          << "\" height=\"" << num(cs * s) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  out << "</g>\n";

  out << "<g id=\"overlap\" fill=\"#3050ff\" fill-opacity=\"0.55\">\n";
  for (CellIndex c : overlap_cells(traj, options.overlap_window)) {
    out << "<rect x=\"" << px(c.col * cs) << "\" y=\"" << py((c.row + 1) * cs) << "\" width=\"" << num(cs * s)
        << "\" height=\"" << num(cs * s) << "\"/>\n";
  }
  out << "</g>\n";

  if (options.draw_footprints) {
    out << "<g id=\"footprints\" fill=\"none\" stroke=\"#202020\" stroke-width=\"0.8\" stroke-opacity=\"0.6\">\n";
    const double step = 2.0 * std::numbers::pi / traj.psi_bins;
    for (const TrajectoryStep& st : traj.steps) {
      const double a = step * st.psi;
      const double cx = st.x + geom.offset * std::cos(a), cy = st.y + geom.offset * std::sin(a);
      const double ux = std::cos(a), uy = std::sin(a);
      const double hl = geom.rect_length / 2, hw = geom.rect_width / 2;
      out << "<polygon points=\"";
      const double corners[4][2] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
      for (int i = 0; i < 4; ++i) {
        const double x = cx + corners[i][0] * ux - corners[i][1] * uy;
        const double y = cy + corners[i][0] * uy + corners[i][1] * ux;
        out << (i ? " " : "") << px(x) << ',' << py(y);
      }
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  if (!traj.steps.empty()) {
    out << "<polyline id=\"path\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
      out << (i ? " " : "") << px(traj.steps[i].x) << ',' << py(traj.steps[i].y);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace covplan
