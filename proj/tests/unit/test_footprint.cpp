#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "covplan/footprint.hpp"
#include "oracles.hpp"

using namespace covplan;

namespace {

SensorGeometry geometry(double len, double wid, double offset, int bins = 16) {
  SensorGeometry g;
  g.rect_length = len;
  g.rect_width = wid;
  g.offset = offset;
  g.psi_bins = bins;
  return g;
}

}  // namespace

TEST(Footprint, AxisAlignedThreeByTwo) {
  const CoverageMap map(10, 10, 1.0, 10);
  // Rectangle [2, 5] x [3, 5]: centre (3.5, 4), length 3 along x, width 2.
  const Footprint fp = footprint_cells(map, 3.5, 4.0, 0.0, geometry(3.0, 2.0, 0.0));
  const std::vector<CellIndex> want{{3, 2}, {3, 3}, {3, 4}, {4, 2}, {4, 3}, {4, 4}};
  EXPECT_EQ(fp.cells, want);
}

TEST(Footprint, QuarterTurnKeepsCountAndShape) {
  const CoverageMap map(40, 40, 1.0, 10);
  const SensorGeometry g = geometry(3.0, 2.0, 4.0);
  const Footprint east = footprint_cells(map, 20.5, 20.0, 0.0, g);
  const Footprint north = footprint_cells(map, 20.0, 20.5, std::numbers::pi / 2, g);
  ASSERT_EQ(east.size(), 6U);
  ASSERT_EQ(north.size(), east.size());
  // North is east rotated a quarter turn about the robot: (dr, dc) -> (dc, -dr).
  std::vector<CellIndex> rotated;
  for (const CellIndex& c : east.cells) rotated.push_back({20 + (c.col - 20), 20 - (c.row - 20) - 1});
  std::sort(rotated.begin(), rotated.end());
  EXPECT_EQ(north.cells, rotated);
}

TEST(Footprint, TranslationByWholeCells) {
  const CoverageMap map(60, 60, 1.0, 10);
  const SensorGeometry g;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(20.0, 30.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> shift(-8, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = pos(rng);
    const double y = pos(rng);
    const double psi = ang(rng);
    const int dx = shift(rng);
    const int dy = shift(rng);
    const Footprint a = footprint_cells(map, x, y, psi, g);
    const Footprint b = footprint_cells(map, x + dx, y + dy, psi, g);
    std::vector<CellIndex> moved;
    for (const CellIndex& c : a.cells) moved.push_back({c.row + dy, c.col + dx});
    EXPECT_EQ(b.cells, moved);
  }
}

TEST(Footprint, MatchesClippedAreaOracleAtThirtyDegrees) {
  const CoverageMap map(20, 20, 1.0, 10);
  const SensorGeometry g = geometry(6.0, 4.0, 5.0);
  const double psi = std::numbers::pi / 6;
  const double x = 7.3;
  const double y = 8.1;
  const Footprint fp = footprint_cells(map, x, y, psi, g);
  EXPECT_EQ(fp.cells, oracle::footprint_by_area(20, 20, 1.0, x + 5.0 * std::cos(psi), y + 5.0 * std::sin(psi), 6.0,
                                                4.0, psi));
}

TEST(Footprint, MatchesClippedAreaOracleOnRandomPoses) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> pos(0.0, 25.0);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  std::uniform_real_distribution<double> dim(0.7, 7.0);
  std::uniform_int_distribution<int> bins(4, 24);
  for (int trial = 0; trial < 200; ++trial) {
    const double cs = trial % 3 == 0 ? 0.5 : 1.0;
    const CoverageMap map(static_cast<int>(25 / cs), static_cast<int>(25 / cs), cs, 10);
    const SensorGeometry g = geometry(dim(rng), dim(rng), dim(rng), bins(rng));
    const double x = pos(rng);
    const double y = pos(rng);
    const double psi = trial % 2 == 0 ? ang(rng) : g.psi_angle(trial % g.psi_bins);
    const Footprint fp = footprint_cells(map, x, y, psi, g);
    const auto want = oracle::footprint_by_area(map.width(), map.height(), cs, x + g.offset * std::cos(psi),
                                                y + g.offset * std::sin(psi), g.rect_length, g.rect_width, psi);
    ASSERT_EQ(fp.cells, want) << "trial " << trial;
  }
}

TEST(Footprint, SizeStaysWithinCoarseBound) {
  const CoverageMap map(80, 80, 1.0, 10);
  const SensorGeometry g;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(20.0, 60.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 500; ++trial) {
    const Footprint fp = footprint_cells(map, pos(rng), pos(rng), ang(rng), g);
    EXPECT_LE(static_cast<int>(fp.size()), g.max_cells(1.0));
  }
  EXPECT_EQ(g.max_cells(1.0), 70);
}

TEST(Footprint, ClipsAtMapEdgeAndRejectsOutsideRobot) {
  const CoverageMap map(10, 10, 1.0, 10);
  const Footprint fp = footprint_cells(map, 9.5, 5.0, 0.0, SensorGeometry{});
  EXPECT_TRUE(fp.cells.empty());
  EXPECT_THROW((void)footprint_cells(map, 10.5, 5.0, 0.0, SensorGeometry{}), MapError);
}

TEST(Footprint, ThetaDoesNotChangeGeometry) {
  const CoverageMap map(30, 30, 1.0, 10);
  const SensorGeometry g;
  EXPECT_EQ(footprint_cells(map, 12.0, 13.0, 1.0, g, 0.0).cells, footprint_cells(map, 12.0, 13.0, 1.0, g, 2.5).cells);
}

TEST(FootprintOverlap, IdenticalDisjointAndShifted) {
  const CoverageMap map(40, 40, 1.0, 10);
  const SensorGeometry g = geometry(6.0, 4.0, 0.0);
  const Footprint a = footprint_cells(map, 10.0, 10.0, 0.0, g);
  EXPECT_EQ(footprint_overlap(a, a), a.cells);
  const Footprint far = footprint_cells(map, 30.0, 30.0, 0.0, g);
  EXPECT_TRUE(footprint_overlap(a, far).empty());
  const Footprint half = footprint_cells(map, 13.0, 10.0, 0.4, g);
  std::vector<CellIndex> want;
  for (const CellIndex& c : a.cells) {
    bool in_b = false;
    for (const CellIndex& d : half.cells) in_b = in_b || d == c;
    if (in_b) want.push_back(c);
  }
  EXPECT_FALSE(want.empty());
  EXPECT_EQ(footprint_overlap(a, half), want);
}

TEST(SensorGeometry, BinsWrapAndMeasureCircularDistance) {
  const SensorGeometry g;
  EXPECT_EQ(g.wrap_bin(-1), 15);
  EXPECT_EQ(g.wrap_bin(17), 1);
  EXPECT_EQ(g.bin_distance(1, 15), 2);
  EXPECT_EQ(g.bin_distance(0, 8), 8);
  EXPECT_EQ(g.nearest_bin(-0.01), 0);
  EXPECT_EQ(g.nearest_bin(std::numbers::pi), 8);
  EXPECT_THROW(geometry(0.0, 1.0, 1.0).validate(), std::invalid_argument);
}
