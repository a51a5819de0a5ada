#pragma once

// Brute-force reference implementations shared by the unit tests and the
// acceptance binary. None of them call the code they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covplan/costs.hpp"
#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"
#include "covplan/lattice.hpp"
#include "covplan/state_spaces.hpp"

namespace oracle {

using covplan::CellIndex;
using covplan::Cost;
using covplan::CoverageMap;

// ---------------------------------------------------------------------------
// Maps

/// Random map with lifetimes in [lmin, lmax], ages in [0, amax] and a share
/// of no-coverage cells.
inline CoverageMap random_map(std::mt19937_64& rng, int width, int height, double cell_size, double nc_prob,
                              int lmin = 20, int lmax = 120, int amax = 150) {
  CoverageMap map(width, height, cell_size, lmin);
  std::uniform_int_distribution<int> life(lmin, lmax);
  std::uniform_int_distribution<int> age(0, amax);
  std::bernoulli_distribution nc(nc_prob);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (nc(rng)) {
        map.set_cell({r, c}, {covplan::Zone::NoCoverage, 0, 0});
      } else {
        map.set_cell({r, c}, {covplan::Zone::Coverage, life(rng), age(rng)});
      }
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// Footprint rasterization by exact clipped area

struct Pt {
  double x;
  double y;
};

/// Clips a convex polygon to one half-plane: keep points where
/// sign * (coord - bound) <= 0 on the chosen axis.
inline std::vector<Pt> clip_half_plane(const std::vector<Pt>& poly, bool x_axis, double bound, double sign) {
  std::vector<Pt> out;
  const std::size_t n = poly.size();
  auto value = [&](const Pt& p) { return sign * ((x_axis ? p.x : p.y) - bound); };
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % n];
    const double va = value(a);
    const double vb = value(b);
    if (va <= 0) out.push_back(a);
    if ((va < 0 && vb > 0) || (va > 0 && vb < 0)) {
      const double t = va / (va - vb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

inline double polygon_area(const std::vector<Pt>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

/// Every in-bounds cell whose square shares positive area with the rectangle,
/// found by clipping the rectangle against each cell in turn.
inline std::vector<CellIndex> footprint_by_area(int width, int height, double cs, double cx, double cy, double len,
                                                double wid, double angle) {
  const double ux = std::cos(angle);
  const double uy = std::sin(angle);
  const double hl = 0.5 * len;
  const double hw = 0.5 * wid;
  const std::vector<Pt> rect = {{cx + hl * ux - hw * uy, cy + hl * uy + hw * ux},
                                {cx - hl * ux - hw * uy, cy - hl * uy + hw * ux},
                                {cx - hl * ux + hw * uy, cy - hl * uy - hw * ux},
                                {cx + hl * ux + hw * uy, cy + hl * uy - hw * ux}};
  std::vector<CellIndex> cells;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::vector<Pt> p = rect;
      p = clip_half_plane(p, true, c * cs, -1.0);
      p = clip_half_plane(p, true, (c + 1) * cs, 1.0);
      p = clip_half_plane(p, false, r * cs, -1.0);
      p = clip_half_plane(p, false, (r + 1) * cs, 1.0);
      if (p.size() >= 3 && polygon_area(p) > 1e-12 * cs * cs) cells.push_back({r, c});
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Coverage cost, written out cell by cell

inline Cost coverage_cost(const std::vector<CellIndex>& fp, const std::set<CellIndex>& history, const CoverageMap& map,
                          double lambda) {
  if (fp.empty()) return 0;
  std::int64_t priority = 0;
  int nc = 0;
  for (const CellIndex& c : fp) {
    const covplan::CellState& s = map.cell(c);
    if (s.zone == covplan::Zone::NoCoverage) {
      ++nc;
    } else if (history.count(c) != 0) {
      priority += s.lifetime;
    } else {
      priority += s.lifetime - s.age;
    }
  }
  const double penalty = lambda * 1e6 * nc / static_cast<double>(fp.size());
  return priority * 1'000'000 + static_cast<Cost>(std::llround(penalty));
}

// ---------------------------------------------------------------------------
// Sensor plans by exhaustive enumeration

/// Unshifted cost of a pan sequence: the tick into level k sees the footprints
/// of levels max(0, k - H) .. k - 1 as history.
inline Cost sensor_sequence_cost(const std::vector<covplan::Waypoint>& wps, const std::vector<int>& psi, int history,
                                 const CoverageMap& map, const covplan::SensorGeometry& geom, double lambda) {
  std::vector<std::vector<CellIndex>> fps;
  for (std::size_t k = 0; k < wps.size(); ++k) {
    fps.push_back(covplan::footprint_cells(map, wps[k].x, wps[k].y, geom.psi_angle(psi[k]), geom, wps[k].theta).cells);
  }
  Cost total = 0;
  for (int k = 1; k < static_cast<int>(wps.size()); ++k) {
    std::set<CellIndex> hist;
    for (int j = std::max(0, k - history); j < k; ++j) hist.insert(fps[j].begin(), fps[j].end());
    total += coverage_cost(fps[k], hist, map, lambda);
  }
  return total;
}

struct SensorOptimum {
  Cost cost = std::numeric_limits<Cost>::max();
  std::vector<std::vector<int>> argmin;  // every optimal sequence
  std::size_t sequences = 0;
};

/// All 3^(L-1) pan sequences from psi0.
inline SensorOptimum enumerate_sensor(const std::vector<covplan::Waypoint>& wps, int psi0, int history,
                                      const CoverageMap& map, const covplan::SensorGeometry& geom, double lambda,
                                      Cost per_tick_shift = 0) {
  SensorOptimum best;
  const int steps = static_cast<int>(wps.size()) - 1;
  std::size_t count = 1;
  for (int i = 0; i < steps; ++i) count *= 3;
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<int> psi{psi0};
    std::size_t rest = code;
    for (int i = 0; i < steps; ++i) {
      psi.push_back(geom.wrap_bin(psi.back() + static_cast<int>(rest % 3) - 1));
      rest /= 3;
    }
    const Cost c = sensor_sequence_cost(wps, psi, history, map, geom, lambda) + per_tick_shift * steps;
    ++best.sequences;
    if (c < best.cost) {
      best.cost = c;
      best.argmin.clear();
    }
    if (c == best.cost) best.argmin.push_back(psi);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Robot graph: Dijkstra over (cell, heading, speed) with time as cost

struct RobotKey {
  int cx, cy, heading, speed;
  friend auto operator<=>(const RobotKey&, const RobotKey&) = default;
};

/// Least time (seconds) from `start` to any node in `goal`, or -1 when no
/// node is reachable within `horizon` seconds.
inline int robot_optimal_time(const covplan::RobotState& start, CellIndex goal, const CoverageMap& map,
                              const covplan::PrimitiveLibrary& lib, int horizon) {
  std::map<RobotKey, int> dist;
  using Item = std::pair<int, RobotKey>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const RobotKey s0{start.cx, start.cy, start.heading, start.speed};
  dist[s0] = 0;
  open.push({0, s0});
  while (!open.empty()) {
    auto [d, k] = open.top();
    open.pop();
    if (dist[k] != d) continue;
    if (CellIndex{k.cy, k.cx} == goal) return d;
    const covplan::RobotState s{k.cx, k.cy, k.heading, k.speed, start.t + d};
    for (const auto& succ : covplan::robot_successors(s, lib, map)) {
      const int nd = d + succ.primitive->duration;
      if (nd > horizon) continue;
      const RobotKey nk{succ.state.cx, succ.state.cy, succ.state.heading, succ.state.speed};
      auto it = dist.find(nk);
      if (it == dist.end() || nd < it->second) {
        dist[nk] = nd;
        open.push({nd, nk});
      }
    }
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Joint graph: Dijkstra over the full space

struct JointOptimum {
  bool found = false;
  Cost cost = 0;
  std::size_t states = 0;
};

inline JointOptimum joint_optimal(const covplan::JointState& start, CellIndex goal, const covplan::JointSpace& space) {
  std::unordered_map<covplan::JointState, Cost, covplan::JointStateHash> dist;
  using Item = std::pair<Cost, covplan::JointState>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[start] = 0;
  open.push({0, start});
  std::vector<covplan::Successor<covplan::JointState>> succ;
  JointOptimum out;
  while (!open.empty()) {
    auto [d, s] = open.top();
    open.pop();
    if (dist[s] != d) continue;
    if (s.at_lattice() && s.anchor.cell() == goal) {
      out.found = true;
      out.cost = d;
      break;
    }
    succ.clear();
    space.expand(s, succ);
    for (const auto& e : succ) {
      const Cost nd = d + e.cost;
      auto it = dist.find(e.state);
      if (it == dist.end() || nd < it->second) {
        dist[e.state] = nd;
        open.push({nd, e.state});
      }
    }
  }
  out.states = dist.size();
  return out;
}

/// Edge distance from the nearest of `sources`, over every reachable state.
inline std::unordered_map<covplan::JointState, int, covplan::JointStateHash> joint_bfs(
    const std::vector<covplan::JointState>& sources, const covplan::JointSpace& space) {
  std::unordered_map<covplan::JointState, int, covplan::JointStateHash> depth;
  std::queue<covplan::JointState> q;
  for (const auto& s : sources) {
    if (depth.emplace(s, 0).second) q.push(s);
  }
  std::vector<covplan::Successor<covplan::JointState>> succ;
  while (!q.empty()) {
    const covplan::JointState s = q.front();
    q.pop();
    succ.clear();
    space.expand(s, succ);
    for (const auto& e : succ) {
      if (depth.emplace(e.state, depth[s] + 1).second) q.push(e.state);
    }
  }
  return depth;
}

// ---------------------------------------------------------------------------
// Tiny joint instance: 5 x 5 map, 4 headings, one speed, 12 s horizon

inline covplan::LatticeConfig tiny_lattice() {
  covplan::LatticeConfig c;
  c.n_theta = 4;
  c.speeds = {0.5};
  c.max_heading_change = 1;
  return c;
}

inline covplan::SensorGeometry tiny_sensor() {
  covplan::SensorGeometry g;
  g.rect_length = 2.0;
  g.rect_width = 1.0;
  g.offset = 1.5;
  g.psi_bins = 4;
  return g;
}

}  // namespace oracle
