#include <gtest/gtest.h>

#include <random>

#include "covplan/costs.hpp"
#include "oracles.hpp"

using namespace covplan;

namespace {

// A 10 x 1 strip whose footprint is every cell.
struct Strip {
  CoverageMap map{10, 1, 1.0, 0};
  Footprint fp;
  Strip() {
    for (int c = 0; c < 10; ++c) fp.cells.push_back({0, c});
  }
  void set(int c, int lifetime, int age) { map.set_cell({0, c}, {Zone::Coverage, lifetime, age}); }
  void nc(int c) { map.set_cell({0, c}, {Zone::NoCoverage, 0, 0}); }
};

}  // namespace

TEST(Costs, AllNoCoverageCostsLambda) {
  Strip s;
  for (int c = 0; c < 10; ++c) s.nc(c);
  EXPECT_EQ(cost_no_history(s.fp, s.map, CostParams{}), 100 * kCostScale);
}

TEST(Costs, ZeroPriorityCellsCostNothing) {
  Strip s;
  for (int c = 0; c < 10; ++c) s.set(c, 30 + c, 30 + c);
  EXPECT_EQ(cost_no_history(s.fp, s.map, CostParams{}), 0);
}

TEST(Costs, MixedFootprintWithoutHistory) {
  Strip s;
  const int p[] = {5, 5, -3, 0, 2, 1};
  for (int c = 0; c < 6; ++c) s.set(c, 40, 40 - p[c]);
  for (int c = 6; c < 10; ++c) s.nc(c);
  EXPECT_EQ(cost_no_history(s.fp, s.map, CostParams{}), 50 * kCostScale);
}

TEST(Costs, FootprintInsideHistoryUsesLifetimes) {
  CoverageMap map(8, 1, 1.0, 0);
  Footprint fp;
  for (int c = 0; c < 8; ++c) {
    map.set_cell({0, c}, {Zone::Coverage, 100, 17 * c});
    fp.cells.push_back({0, c});
  }
  EXPECT_EQ(cost_with_history(fp, fp.cells, map, CostParams{}), 800 * kCostScale);
}

TEST(Costs, MixedFootprintWithHistory) {
  Strip s;
  for (int c = 0; c < 3; ++c) s.set(c, 100, 60);
  s.set(3, 30, 20);
  s.set(4, 30, 35);
  for (int c = 5; c < 10; ++c) s.nc(c);
  const std::vector<CellIndex> hist{{0, 0}, {0, 1}, {0, 2}};
  EXPECT_EQ(cost_with_history(s.fp, hist, s.map, CostParams{}), 355 * kCostScale);
}

TEST(Costs, EmptyFootprintCostsZero) {
  const CoverageMap map(2, 2, 1.0, 10);
  EXPECT_EQ(cost_no_history(Footprint{}, map, CostParams{}), 0);
}

TEST(Costs, EmptyHistoryReducesToNoHistoryForm) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> pos(0.0, 30.0);
  std::uniform_real_distribution<double> ang(0.0, 7.0);
  std::uniform_real_distribution<double> lam(0.0, 500.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CoverageMap map = oracle::random_map(rng, 30, 30, 1.0, 0.3);
    const Footprint fp = footprint_cells(map, pos(rng), pos(rng), ang(rng), SensorGeometry{});
    CostParams params;
    params.lambda = lam(rng);
    const Cost a = cost_with_history(fp, {}, map, params);
    EXPECT_EQ(a, cost_no_history(fp, map, params));
    EXPECT_EQ(a, oracle::coverage_cost(fp.cells, {}, map, params.lambda));
  }
}

TEST(Costs, HistoryNeverLowersCost) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const CoverageMap map = oracle::random_map(rng, 12, 12, 1.0, 0.2);
    const Footprint fp = footprint_cells(map, 6.0, 6.0, 0.3 * trial, SensorGeometry{});
    std::vector<CellIndex> small;
    std::vector<CellIndex> large;
    for (const CellIndex& c : fp.cells) {
      const bool in_large = coin(rng);
      if (in_large) large.push_back(c);
      if (in_large && coin(rng)) small.push_back(c);
    }
    EXPECT_LE(cost_with_history(fp, small, map, CostParams{}), cost_with_history(fp, large, map, CostParams{}));
  }
}

TEST(Costs, LambdaMattersOnlyWithNoCoverageCells) {
  Strip s;
  for (int c = 0; c < 10; ++c) s.set(c, 50, c);
  CostParams lo;
  CostParams hi;
  hi.lambda = 250.0;
  EXPECT_EQ(cost_no_history(s.fp, s.map, lo), cost_no_history(s.fp, s.map, hi));
  s.nc(9);
  EXPECT_LT(cost_no_history(s.fp, s.map, lo), cost_no_history(s.fp, s.map, hi));
}

TEST(Costs, EdgeModes) {
  CostParams p;
  EXPECT_EQ(edge_cost_joint(50 * kCostScale, p, EdgeMode::Refinement), 50 * kCostScale);
  p.w_motion = 1.0;
  p.w_sensor = 0.0;
  Cost path = 0;
  for (int tick = 0; tick < 12; ++tick) path += edge_cost_joint(37 * kCostScale, p, EdgeMode::Baseline);
  EXPECT_EQ(path, 4 * 3 * kCostScale);
  p.w_motion = 0.0;
  p.w_sensor = 1.0;
  EXPECT_EQ(edge_cost_joint(-12 * kCostScale, p, EdgeMode::Baseline),
            edge_cost_joint(-12 * kCostScale, p, EdgeMode::Refinement));
}

TEST(Costs, ShiftMakesEveryFootprintPositive) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> pos(0.0, 40.0);
  std::uniform_real_distribution<double> ang(0.0, 7.0);
  const SensorGeometry geom;
  const CostParams params;
  for (int trial = 0; trial < 20; ++trial) {
    const CoverageMap map = oracle::random_map(rng, 40, 40, 1.0, 0.2, 10, 60, 200);
    const Cost shift = coverage_cost_shift(map, geom, params);
    EXPECT_EQ(shift, (70LL * std::max(0, -map.min_priority()) + 100) * kCostScale);
    for (int k = 0; k < 50; ++k) {
      const Footprint fp = footprint_cells(map, pos(rng), pos(rng), ang(rng), geom);
      EXPECT_GE(cost_no_history(fp, map, params) + shift, from_units(params.lambda));
    }
  }
}
