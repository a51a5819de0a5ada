#include "covplan/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace covplan {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace

GoalCell make_goal(const CoverageMap& map, CellIndex cell) {
  if (!map.in_bounds(cell)) throw MapError("goal cell out of bounds");
  return {cell, (cell.col + 0.5) * map.cell_size(), (cell.row + 0.5) * map.cell_size()};
}

double h_euclidean(double x, double y, const GoalCell& goal, double v_max) {
  return std::hypot(goal.x - x, goal.y - y) / v_max;
}

std::array<int, 3> dubins_segment_turns(DubinsWord word) {
  switch (word) {
    case DubinsWord::LSL: return {1, 0, 1};
    case DubinsWord::RSR: return {-1, 0, -1};
    case DubinsWord::LSR: return {1, 0, -1};
    case DubinsWord::RSL: return {-1, 0, 1};
    case DubinsWord::RLR: return {-1, 1, -1};
    case DubinsWord::LRL: return {1, -1, 1};
  }
  return {0, 0, 0};
}

std::optional<DubinsPath> dubins_shortest(double x0, double y0, double th0, double x1, double y1, double th1,
                                          double r_min) {
  // Normalized frame: start at origin, goal on the +x axis at distance d.
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double d = std::hypot(dx, dy) / r_min;
  const double phi = std::atan2(dy, dx);
  const double a = mod2pi(th0 - phi);
  const double b = mod2pi(th1 - phi);
  const double sa = std::sin(a), sb = std::sin(b), ca = std::cos(a), cb = std::cos(b);
  const double cab = std::cos(a - b);

  std::optional<DubinsPath> best;
  auto consider = [&](DubinsWord w, double t, double p, double q) {
    const double total = (t + p + q) * r_min;
    if (!best || total < best->total) best = DubinsPath{w, {t * r_min, p * r_min, q * r_min}, total};
  };

  {  // LSL
    const double p2 = 2 + d * d - 2 * cab + 2 * d * (sa - sb);
    if (p2 >= 0) {
      const double tmp = std::atan2(cb - ca, d + sa - sb);
      consider(DubinsWord::LSL, mod2pi(tmp - a), std::sqrt(p2), mod2pi(b - tmp));
    }
  }
  {  // RSR
    const double p2 = 2 + d * d - 2 * cab + 2 * d * (sb - sa);
    if (p2 >= 0) {
      const double tmp = std::atan2(ca - cb, d - sa + sb);
      consider(DubinsWord::RSR, mod2pi(a - tmp), std::sqrt(p2), mod2pi(tmp - b));
    }
  }
  {  // LSR
    const double p2 = -2 + d * d + 2 * cab + 2 * d * (sa + sb);
    if (p2 >= 0) {
      const double p = std::sqrt(p2);
      const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      consider(DubinsWord::LSR, mod2pi(tmp - a), p, mod2pi(tmp - mod2pi(b)));
    }
  }
  {  // RSL
    const double p2 = -2 + d * d + 2 * cab - 2 * d * (sa + sb);
    if (p2 >= 0) {
      const double p = std::sqrt(p2);
      const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      consider(DubinsWord::RSL, mod2pi(a - tmp), p, mod2pi(b - tmp));
    }
  }
  {  // RLR
    const double tmp = (6.0 - d * d + 2 * cab + 2 * d * (sa - sb)) / 8.0;
    if (std::abs(tmp) <= 1.0) {
      const double p = mod2pi(kTwoPi - std::acos(tmp));
      const double t = mod2pi(a - std::atan2(ca - cb, d - sa + sb) + p / 2.0);
      consider(DubinsWord::RLR, t, p, mod2pi(a - b - t + p));
    }
  }
  {  // LRL
    const double tmp = (6.0 - d * d + 2 * cab + 2 * d * (sb - sa)) / 8.0;
    if (std::abs(tmp) <= 1.0) {
      const double p = mod2pi(kTwoPi - std::acos(tmp));
      const double t = mod2pi(-a - std::atan2(ca - cb, d + sa - sb) + p / 2.0);
      consider(DubinsWord::LRL, t, p, mod2pi(mod2pi(b) - a - t + p));
    }
  }
  return best;
}

double dubins_length_free_heading(double x, double y, double theta, double gx, double gy, double r_min,
                                  int final_headings) {
  double best = kUnreachable;
  for (int k = 0; k < final_headings; ++k) {
    const double th1 = kTwoPi * k / final_headings;
    if (auto path = dubins_shortest(x, y, theta, gx, gy, th1, r_min)) best = std::min(best, path->total);
  }
  return best;
}

double h_dubins(double x, double y, double theta, const GoalCell& goal, double r_min, double v_max) {
  return dubins_length_free_heading(x, y, theta, goal.x, goal.y, r_min) / v_max;
}

DijkstraField::DijkstraField(const CoverageMap& map, CellIndex goal)
    : width_(map.width()), height_(map.height()), cell_size_(map.cell_size()) {
  if (!map.in_bounds(goal)) throw MapError("goal cell out of bounds");
  dist_.assign(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), kUnreachable);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const int start = goal.row * width_ + goal.col;
  dist_[static_cast<std::size_t>(start)] = 0.0;
  open.push({0.0, start});
  const double diag = std::numbers::sqrt2 * cell_size_;
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (d > dist_[static_cast<std::size_t>(idx)]) continue;
    const int r = idx / width_;
    const int c = idx % width_;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nr = r + dr, nc = c + dc;
        if (nr < 0 || nr >= height_ || nc < 0 || nc >= width_) continue;
        const double nd = d + ((dr != 0 && dc != 0) ? diag : cell_size_);
        auto& slot = dist_[static_cast<std::size_t>(nr * width_ + nc)];
        if (nd < slot) {
          slot = nd;
          open.push({nd, nr * width_ + nc});
        }
      }
    }
  }
}

double DijkstraField::distance(CellIndex c) const {
  if (c.row < 0 || c.row >= height_ || c.col < 0 || c.col >= width_) return kUnreachable;
  return dist_[static_cast<std::size_t>(c.row * width_ + c.col)];
}

double h_dijkstra(const DijkstraField& field, CellIndex c, double v_max) { return field.distance(c) / v_max; }

}  // namespace covplan
