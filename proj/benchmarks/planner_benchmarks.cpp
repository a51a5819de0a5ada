#include <benchmark/benchmark.h>

#include <random>

#include "covplan/harness.hpp"
#include "covplan/splash.hpp"
#include "covplan/split.hpp"

using namespace covplan;

namespace {

const PrimitiveLibrary& lib() {
  static const PrimitiveLibrary l = generate_primitives(LatticeConfig{});
  return l;
}

const CoverageMap& desk_map() {
  static const CoverageMap m = [] {
    MapGenParams p;
    p.seed = 11;
    return gen_decayed_map(p, {600}, SensorGeometry{}).front();
  }();
  return m;
}

void BM_Footprint(benchmark::State& state) {
  const SensorGeometry geom;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(10.0, 90.0);
  std::uniform_real_distribution<double> ang(0.0, 6.28);
  for (auto _ : state) {
    benchmark::DoNotOptimize(footprint_cells(desk_map(), pos(rng), pos(rng), ang(rng), geom));
  }
}
BENCHMARK(BM_Footprint);

void BM_PlanRobot(benchmark::State& state) {
  const SearchConfig search;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_robot({10, 10, 0, 0, 0}, {80, 75}, desk_map(), lib(), search));
  }
}
BENCHMARK(BM_PlanRobot)->Unit(benchmark::kMillisecond);

void BM_PlanSensor(benchmark::State& state) {
  const RobotPlan robot = plan_robot({10, 10, 0, 0, 0}, {80, 75}, desk_map(), lib(), SearchConfig{});
  const int history = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_sensor(robot.waypoints, 0, history, desk_map(), SensorGeometry{}, CostParams{}));
  }
  state.counters["waypoints"] = static_cast<double>(robot.waypoints.size());
}
BENCHMARK(BM_PlanSensor)->Arg(0)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_JointExpansion(benchmark::State& state) {
  const PlannerConfig cfg;
  const JointSpace space(desk_map(), lib(), cfg.sensor, cfg.cost, EdgeMode::Refinement, cfg.search.t_max,
                         coverage_cost_shift(desk_map(), cfg.sensor, cfg.cost));
  const JointState s = space.start({50, 50, 3, 1, 0}, 3);
  std::vector<Successor<JointState>> out;
  for (auto _ : state) {
    out.clear();
    space.expand(s, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["successors"] = static_cast<double>(out.size());
}
BENCHMARK(BM_JointExpansion);

void BM_SplitTwoIterations(benchmark::State& state) {
  const PlannerConfig cfg;
  SplitLimits limits;
  limits.budget_s = 0.0;
  limits.max_iterations = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(split({10, 10, 0, 0, 0}, {60, 55}, 0, desk_map(), lib(), cfg, limits));
  }
}
BENCHMARK(BM_SplitTwoIterations)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
