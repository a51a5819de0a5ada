// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails. Tolerances and sample sizes are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "covplan/harness.hpp"
#include "covplan/splash.hpp"
#include "covplan/split.hpp"
#include "oracles.hpp"

using namespace covplan;

namespace {

// Pinned parameters.
constexpr int kSensorInstances = 120;
constexpr int kReductionPairs = 1000;
constexpr int kDeskInstances = 20;
constexpr double kDeskBudgetS = 30.0;
constexpr int kTinyInstances = 20;
constexpr int kMhaInstances = 50;
constexpr double kMhaBound = 4.0;  // w1 * w2 at defaults
constexpr int kFootprintPoses = 200;
constexpr double kBranchingTarget = 144.0;
constexpr double kBranchingTolerance = 0.20;
constexpr int kBranchingSamples = 200;
constexpr int kTimingInstances = 6;
constexpr double kBaselineTimeoutS = 20.0;
constexpr int kSweepHistoryA = 0;
constexpr int kSweepHistoryB = 3;
constexpr int kMapInvariantTrials = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const PrimitiveLibrary& default_lib() {
  static const PrimitiveLibrary lib = generate_primitives(LatticeConfig{});
  return lib;
}

// The standard desk-scale set: 20 decayed 100 x 100 maps, 10 pairs each.
const InstanceSet& desk_set() {
  static const InstanceSet set = make_instance_set(PlannerConfig{});
  return set;
}

std::vector<Waypoint> random_walk(std::mt19937_64& rng, int levels, double size) {
  std::uniform_real_distribution<double> pos(0.3 * size, 0.7 * size);
  std::uniform_real_distribution<double> turn(-0.6, 0.6);
  std::uniform_real_distribution<double> step(0.5, 4.0);
  std::vector<Waypoint> w;
  double x = pos(rng);
  double y = pos(rng);
  double th = 5 * turn(rng);
  for (int k = 0; k < levels; ++k) {
    w.push_back({x, y, th, 0.0, k});
    th += turn(rng);
    const double d = step(rng);
    x = std::clamp(x + d * std::cos(th), 0.1, size - 0.1);
    y = std::clamp(y + d * std::sin(th), 0.1, size - 0.1);
  }
  return w;
}

// ---------------------------------------------------------------------------

Outcome sensor_optimality() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> levels(2, 8);
  SensorGeometry geom;
  geom.psi_bins = 8;
  geom.offset = 3.0;
  const CostParams params;
  int mismatches = 0;
  for (int i = 0; i < kSensorInstances; ++i) {
    const CoverageMap map = oracle::random_map(rng, 24, 24, 1.0, 0.15);
    const auto wps = random_walk(rng, levels(rng), 24.0);
    const int h = i % 3;
    const int psi0 = i % geom.psi_bins;
    const auto want = oracle::enumerate_sensor(wps, psi0, h, map, geom, params.lambda);
    if (plan_sensor(wps, psi0, h, map, geom, params).cost != want.cost) ++mismatches;
  }
  return {mismatches == 0, fmt("%d instances (L<=8, 8 bins, H in {0,1,2}), %d mismatches", kSensorInstances, mismatches)};
}

Outcome history_reduction() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> pos(0.0, 30.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> lam(0.0, 400.0);
  int mismatches = 0;
  for (int i = 0; i < kReductionPairs; ++i) {
    const CoverageMap map = oracle::random_map(rng, 30, 30, 1.0, 0.25, 5, 200, 300);
    const Footprint fp = footprint_cells(map, pos(rng), pos(rng), ang(rng), SensorGeometry{});
    CostParams p;
    p.lambda = lam(rng);
    if (cost_with_history(fp, {}, map, p) != cost_no_history(fp, map, p)) ++mismatches;
  }
  return {mismatches == 0, fmt("%d random pairs, %d mismatches", kReductionPairs, mismatches)};
}

struct RefinementStats {
  int runs = 0;
  int non_monotone = 0;
  std::size_t iterations = 0;
  std::size_t violations = 0;
  int improved = 0;
};

RefinementStats desk_refinement;

Outcome anytime_monotonicity() {
  const InstanceSet& set = desk_set();
  const PlannerConfig config;
  for (int k = 0; k < kDeskInstances; ++k) {
    const Instance& inst = set.instances[static_cast<std::size_t>(k) * set.instances.size() / kDeskInstances];
    SplitLimits limits;
    limits.budget_s = kDeskBudgetS;
    const SplitResult r = split(inst.start, inst.goal, inst.psi0, set.maps[static_cast<std::size_t>(inst.map_index)],
                                default_lib(), config, limits);
    if (!r.found()) continue;
    ++desk_refinement.runs;
    Cost prev = r.initial_cost;
    bool ok = true;
    for (const TraceRow& row : r.trace.rows) {
      ok = ok && row.cost <= prev;
      prev = row.cost;
      desk_refinement.violations += row.level_violations;
    }
    desk_refinement.iterations += r.trace.rows.size();
    if (r.final_cost < r.initial_cost) ++desk_refinement.improved;
    if (!ok) ++desk_refinement.non_monotone;
  }

  int exact = 0;
  std::size_t tiny_violations = 0;
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> cell(0, 4);
  std::uniform_int_distribution<int> heading(0, 3);
  const PrimitiveLibrary lib = generate_primitives(oracle::tiny_lattice());
  PlannerConfig tiny;
  tiny.lattice = oracle::tiny_lattice();
  tiny.sensor = oracle::tiny_sensor();
  tiny.search.t_max = 12;
  tiny.search.r_min = 1.0;
  for (int done = 0; done < kTinyInstances;) {
    const CoverageMap map = oracle::random_map(rng, 5, 5, 1.0, 0.2, 10, 40, 60);
    const RobotState start{cell(rng), cell(rng), heading(rng), 0, 0};
    const CellIndex goal{cell(rng), cell(rng)};
    if (goal == start.cell() || oracle::robot_optimal_time(start, goal, map, lib, 12) <= 0) continue;
    ++done;
    SplitLimits unlimited;
    unlimited.budget_s = 0.0;
    const SplitResult r = split(start, goal, 0, map, lib, tiny, unlimited);
    const JointSpace space(map, lib, tiny.sensor, tiny.cost, EdgeMode::Refinement, 12,
                           coverage_cost_shift(map, tiny.sensor, tiny.cost));
    const auto opt = oracle::joint_optimal(space.start(start, 0), goal, space);
    if (r.found() && opt.found && r.final_cost == opt.cost) ++exact;
    for (const TraceRow& row : r.trace.rows) tiny_violations += row.level_violations;
  }
  desk_refinement.violations += tiny_violations;
  const bool pass = desk_refinement.runs == kDeskInstances && desk_refinement.non_monotone == 0 &&
                    exact == kTinyInstances;
  return {pass, fmt("%d/%d desk runs at %.0f s, %d non-monotone, %zu iterations, %d improved on the initial path; "
                    "tiny graph exact optimum %d/%d",
                    desk_refinement.runs, kDeskInstances, kDeskBudgetS, desk_refinement.non_monotone,
                    desk_refinement.iterations, desk_refinement.improved, exact, kTinyInstances)};
}

Outcome tunnel_containment() {
  return {desk_refinement.iterations > 0 && desk_refinement.violations == 0,
          fmt("%zu refinement iterations checked, %zu expansions above the iteration level",
              desk_refinement.iterations, desk_refinement.violations)};
}

Outcome mha_bound() {
  std::mt19937_64 rng(1005);
  const CoverageMap map(40, 40, 1.0, 10);
  std::uniform_int_distribution<int> cell(2, 37);
  std::uniform_int_distribution<int> heading(0, 15);
  std::uniform_int_distribution<int> speed(0, 2);
  SearchConfig search;
  search.t_max = 100;
  std::vector<double> ratios;
  int worse = 0;
  int failed = 0;
  while (static_cast<int>(ratios.size()) < kMhaInstances) {
    const RobotState s{cell(rng), cell(rng), heading(rng), speed(rng), 0};
    const CellIndex goal{cell(rng), cell(rng)};
    if (goal == s.cell()) continue;
    const int opt = oracle::robot_optimal_time(s, goal, map, default_lib(), search.t_max);
    if (opt <= 0) continue;
    const RobotPlan plan = plan_robot(s, goal, map, default_lib(), search);
    if (!plan.found()) {
      ++failed;
      ratios.push_back(kMhaBound + 1);
      continue;
    }
    const double ratio = static_cast<double>(plan.motion_cost) / opt;
    if (ratio > kMhaBound) ++worse;
    ratios.push_back(ratio);
  }
  const double med = median(ratios);
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  return {worse == 0 && failed == 0,
          fmt("%d instances, bound %.1f, median ratio %.3f, worst %.3f, %d over bound, %d not found", kMhaInstances,
              kMhaBound, med, worst, worse, failed)};
}

Outcome footprint_oracle() {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> pos(0.0, 30.0);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  const CoverageMap map(30, 30, 1.0, 10);
  const SensorGeometry g;
  int mismatches = 0;
  for (int i = 0; i < kFootprintPoses; ++i) {
    const double x = pos(rng);
    const double y = pos(rng);
    const double psi = i % 2 == 0 ? ang(rng) : g.psi_angle(i % g.psi_bins);
    const auto got = footprint_cells(map, x, y, psi, g).cells;
    const auto want = oracle::footprint_by_area(30, 30, 1.0, x + g.offset * std::cos(psi),
                                                y + g.offset * std::sin(psi), g.rect_length, g.rect_width, psi);
    if (got != want) ++mismatches;
  }
  return {mismatches == 0, fmt("%d random poses, %d mismatches", kFootprintPoses, mismatches)};
}

Outcome branching() {
  // Edges generated while expanding one primitive window lazily: the lattice
  // expansion, then three more per-second expansions along each primitive.
  std::mt19937_64 rng(1007);
  const CoverageMap map(100, 100, 1.0, 100);
  const SensorGeometry geom;
  const JointSpace space(map, default_lib(), geom, CostParams{}, EdgeMode::Refinement, 200, 0);
  std::uniform_int_distribution<int> cell(30, 70);
  std::uniform_int_distribution<int> heading(0, 15);
  std::uniform_int_distribution<int> speed(0, 2);
  std::uniform_int_distribution<int> psi(0, 15);
  double total = 0.0;
  double prims = 0.0;
  for (int i = 0; i < kBranchingSamples; ++i) {
    const JointState s = space.start({cell(rng), cell(rng), heading(rng), speed(rng), 0}, psi(rng));
    const auto first = space.joint_successors(s);
    std::size_t edges = first.size();
    std::set<int> seen;
    for (const JointEdge& e : first) {
      if (!seen.insert(e.to.primitive).second) continue;
      JointState cur = e.to;
      while (!cur.at_lattice()) {
        const auto next = space.joint_successors(cur);
        edges += next.size();
        cur = next.front().to;
      }
    }
    total += static_cast<double>(edges);
    prims += static_cast<double>(seen.size());
  }
  const double avg = total / kBranchingSamples;
  const bool pass = std::abs(avg - kBranchingTarget) <= kBranchingTolerance * kBranchingTarget;
  return {pass, fmt("average %.2f joint edges per lattice state (%.2f primitives x 4 ticks x 3), target %.0f +- %.0f%%",
                    avg, prims / kBranchingSamples, kBranchingTarget, 100 * kBranchingTolerance)};
}

Outcome relative_timing() {
  const InstanceSet& set = desk_set();
  const PlannerConfig config;
  std::vector<double> t_splash, t_split, t_base;
  int base_timeouts = 0;
  for (int k = 0; k < kTimingInstances; ++k) {
    const Instance& inst = set.instances[static_cast<std::size_t>(k) * set.instances.size() / kTimingInstances + 1];
    const CoverageMap& map = set.maps[static_cast<std::size_t>(inst.map_index)];
    const auto s = splash(inst.start, inst.goal, inst.psi0, 3, map, default_lib(), config);
    t_splash.push_back(s.wall_ms());
    SplitLimits two;
    two.budget_s = 0.0;
    two.max_iterations = 2;
    t_split.push_back(split(inst.start, inst.goal, inst.psi0, map, default_lib(), config, two).wall_ms);
    BaselineLimits bl;
    bl.timeout_s = kBaselineTimeoutS;
    const BaselineResult b = joint_baseline(inst.start, inst.goal, inst.psi0, map, default_lib(), config, bl);
    if (b.status == SearchStatus::Timeout) ++base_timeouts;
    t_base.push_back(b.wall_ms);
  }
  const double ms_splash = median(t_splash);
  const double ms_split = median(t_split);
  const double ms_base = median(t_base);
  return {ms_splash < ms_base && ms_split < ms_base,
          fmt("median wall ms: splash(H=3) %.1f, split(2 iterations) %.1f, joint baseline %.1f (%d/%d hit %.0f s)",
              ms_splash, ms_split, ms_base, base_timeouts, kTimingInstances, kBaselineTimeoutS)};
}

Outcome history_trend() {
  const InstanceSet& set = desk_set();
  SweepOptions opts;
  opts.histories = {kSweepHistoryA, kSweepHistoryB};
  opts.run_split = false;
  opts.run_baseline = false;
  opts.jobs = 0;
  std::vector<double> a, b;
  int failures = 0;
  run_sweep(set, default_lib(), PlannerConfig{}, opts, [&](const InstanceResult& r) {
    double na = -1, nb = -1;
    for (const SweepRow& row : r.rows) {
      if (!row.error.empty()) continue;
      if (row.h == kSweepHistoryA) na = static_cast<double>(row.metrics.n);
      if (row.h == kSweepHistoryB) nb = static_cast<double>(row.metrics.n);
    }
    if (na < 0 || nb < 0) {
      ++failures;
      return;
    }
    a.push_back(na);
    b.push_back(nb);
  });
  const double ma = median(a);
  const double mb = median(b);
  const SignTest t = sign_test(b, a);
  const bool pass = set.instances.size() >= 200 && mb >= ma;
  return {pass, fmt("%zu instances (%d failed), median N H=%d: %.1f, H=%d: %.1f; sign test +%d -%d =%d p=%.4g",
                    set.instances.size(), failures, kSweepHistoryA, ma, kSweepHistoryB, mb, t.plus, t.minus, t.ties,
                    t.p_value)};
}

Outcome map_invariants() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> step(0, 60);
  std::bernoulli_distribution pick(0.3);
  int checks = 0;
  int failed = 0;
  auto check = [&](bool ok) {
    ++checks;
    if (!ok) ++failed;
  };
  for (int i = 0; i < kMapInvariantTrials; ++i) {
    const CoverageMap m = oracle::random_map(rng, 12, 9, 1.0, 0.2);
    const int a = step(rng);
    const int b = step(rng);
    check(decayed(decayed(m, a), b) == decayed(m, a + b));
    std::vector<CellIndex> cells;
    for (int r = 0; r < m.height(); ++r) {
      for (int c = 0; c < m.width(); ++c) {
        if (pick(rng)) cells.push_back({r, c});
      }
    }
    const CoverageMap once = covered(m, cells);
    check(covered(once, cells) == once);
    const CoverageMap later = decayed(once, a);
    for (int r = 0; r < m.height(); ++r) {
      for (int c = 0; c < m.width(); ++c) {
        const CellState& s = m.cell({r, c});
        check(later.cell({r, c}).zone == s.zone);
        if (s.zone != Zone::Coverage) continue;
        check(decayed(m, a).priority({r, c}) == m.priority({r, c}) - a);
        const bool was_covered = std::find(cells.begin(), cells.end(), CellIndex{r, c}) != cells.end();
        check(later.priority({r, c}) == (was_covered ? s.lifetime - a : s.lifetime - s.age - a));
      }
    }
  }
  return {failed == 0, fmt("%d checks over %d random maps, %d failed", checks, kMapInvariantTrials, failed)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "sensor-plan optimality", sensor_optimality},
      {2, "empty-history reduction", history_reduction},
      {3, "refinement anytime monotonicity", anytime_monotonicity},
      {4, "tunnel containment", tunnel_containment},
      {5, "multi-heuristic bound", mha_bound},
      {6, "footprint rasterization", footprint_oracle},
      {7, "joint branching", branching},
      {8, "relative timing", relative_timing},
      {9, "history sweep trend", history_trend},
      {10, "map invariants", map_invariants},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
