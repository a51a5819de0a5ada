#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "covplan/coverage_map.hpp"
#include "covplan/lattice.hpp"

namespace covplan {

/// Time lower bounds toward a goal cell. All three heuristics divide a
/// distance by the same speed bound, so Euclidean <= Dubins holds pointwise.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct GoalCell {
  CellIndex cell;
  double x = 0.0;  // cell center
  double y = 0.0;
};

[[nodiscard]] GoalCell make_goal(const CoverageMap& map, CellIndex cell);

[[nodiscard]] double h_euclidean(double x, double y, const GoalCell& goal, double v_max);

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

struct DubinsPath {
  DubinsWord word = DubinsWord::LSL;
  std::array<double, 3> lengths{};  // metric segment lengths
  double total = kUnreachable;
};

/// Shortest Dubins path between full poses (closed-form over the 6 words).
[[nodiscard]] std::optional<DubinsPath> dubins_shortest(double x0, double y0, double th0, double x1, double y1,
                                                        double th1, double r_min);
/// Word segment directions: +1 left, -1 right, 0 straight.
[[nodiscard]] std::array<int, 3> dubins_segment_turns(DubinsWord word);

/// Dubins length to the goal position with free final heading, approximated
/// by the minimum over `final_headings` evenly spaced headings.
[[nodiscard]] double dubins_length_free_heading(double x, double y, double theta, double gx, double gy,
                                                double r_min, int final_headings = 16);
[[nodiscard]] double h_dubins(double x, double y, double theta, const GoalCell& goal, double r_min, double v_max);

/// Shortest 8-connected grid distance (meters) from every cell to the goal.
class DijkstraField {
 public:
  DijkstraField() = default;
  DijkstraField(const CoverageMap& map, CellIndex goal);

  [[nodiscard]] double distance(CellIndex c) const;
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] double cell_size() const noexcept { return cell_size_; }

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 1.0;
  std::vector<double> dist_;
};

[[nodiscard]] double h_dijkstra(const DijkstraField& field, CellIndex c, double v_max);

}  // namespace covplan
