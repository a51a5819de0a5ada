#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covplan/config.hpp"
#include "covplan/coverage_map.hpp"
#include "covplan/footprint.hpp"
#include "covplan/lattice.hpp"
#include "covplan/split.hpp"
#include "covplan/trajectory.hpp"

namespace covplan {

// ---------------------------------------------------------------------------
// Decayed maps

struct MapGenParams {
  std::uint64_t seed = 1;
  int width = 100;
  int height = 100;
  double cell_size = 1.0;
  int lifetime = 300;         // mean lifetime; blocks draw from [l/2, 3l/2]
  int lifetime_block = 10;    // cells per side of a constant-lifetime block
  double nc_fraction = 0.15;  // minimum share of no-coverage cells
  double sweep_speed = 5.0;   // m/s
};

/// Simulates one fixed-sensor vehicle flying a boustrophedon sweep (lanes one
/// footprint width apart, sensor facing forward). Every second the map decays
/// and the swept footprint is marked covered. Returns one snapshot per
/// requested time (seconds, ascending, >= 0); t = 0 is the untouched map.
[[nodiscard]] std::vector<CoverageMap> gen_decayed_map(const MapGenParams& params, const std::vector<int>& snapshot_times,
                                                       const SensorGeometry& geom);

// ---------------------------------------------------------------------------
// Metrics

struct PlanMetrics {
  std::int64_t n = 0;      // distinct coverage cells seen
  std::int64_t sum_p = 0;  // priorities at first coverage
  double motion_cost = 0.0;
  Cost solution_g = 0;
  double plan_wall_ms = 0.0;
  std::size_t expansions = 0;

  /// Mean priority; undefined without coverage.
  [[nodiscard]] std::optional<double> p_bar() const noexcept {
    if (n == 0) return std::nullopt;
    return static_cast<double>(sum_p) / static_cast<double>(n);
  }
};

/// Unions the footprints (first coverage wins) and reads each coverage cell's
/// priority at that instant, with decay applied since the trajectory start.
[[nodiscard]] PlanMetrics evaluate(const Trajectory& traj, const CoverageMap& map);

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  int id = 0;
  int map_index = 0;
  RobotState start;
  CellIndex goal;
  int psi0 = 0;
};

struct InstanceSet {
  std::uint64_t seed = 1;
  int pairs_per_map = 0;
  std::vector<CoverageMap> maps;
  std::vector<Instance> instances;
};

/// Maps are decayed for bench.minutes with seeds derived from bench.seed;
/// start and goal cells are at least bench.min_separation apart.
[[nodiscard]] InstanceSet make_instance_set(const PlannerConfig& config);

/// Same as above with caller-supplied maps.
[[nodiscard]] InstanceSet make_instances_on(std::vector<CoverageMap> maps, const PlannerConfig& config);

// ---------------------------------------------------------------------------
// Sweep

enum class Algorithm { Splash, Split, JointBaseline };

[[nodiscard]] const char* algorithm_name(Algorithm a) noexcept;
[[nodiscard]] std::optional<Algorithm> parse_algorithm(const std::string& name) noexcept;

struct SweepOptions {
  std::vector<int> histories{0, 3, 5};
  bool run_split = true;
  bool run_baseline = true;
  /// Budget-free runs: SPLIT stops after split_iterations, the baseline after
  /// baseline_expansions, and wall-time columns print as 0.
  bool deterministic = false;
  int split_iterations = 3;
  std::size_t baseline_expansions = 200'000;
  int jobs = 1;
};

struct SweepRow {
  int instance_id = 0;
  Algorithm algorithm = Algorithm::Splash;
  int h = 0;          // ignored for the baseline
  int iteration = 0;  // SPLIT: completed refinement iterations
  PlanMetrics metrics;
  std::string error;  // empty on success
};

struct TraceRecord {
  int instance_id = 0;
  TraceRow row;
  double cumulative_ms = 0.0;  // initialization plus refinement up to this row
};

struct InstanceResult {
  std::vector<SweepRow> rows;
  std::vector<TraceRecord> trace;
};

/// Runs every configured algorithm on one instance; failures become rows
/// with a non-empty error.
[[nodiscard]] InstanceResult run_instance(const Instance& inst, const CoverageMap& map, const PrimitiveLibrary& lib,
                                          const PlannerConfig& config, const SweepOptions& options);

/// Worker pool over instances. `sink` receives results strictly in instance
/// order, from one thread at a time.
void run_sweep(const InstanceSet& set, const PrimitiveLibrary& lib, const PlannerConfig& config,
               const SweepOptions& options, const std::function<void(const InstanceResult&)>& sink);

void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const SweepRow& row, bool deterministic);
void write_trace_header(std::ostream& out);
void write_trace_record(std::ostream& out, const TraceRecord& rec, bool deterministic);

// ---------------------------------------------------------------------------
// Statistics

[[nodiscard]] double median(std::vector<double> values);

struct SignTest {
  int plus = 0;
  int minus = 0;
  int ties = 0;
  double p_value = 1.0;  // two-sided exact binomial, ties dropped
};

/// Pairs (a_i, b_i); "plus" counts a_i > b_i.
[[nodiscard]] SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b);

/// Plain-text summary: median N per algorithm/H, sign test of each H against
/// H = 0, median wall times and SPLIT iterations finished within 5 s.
void write_summary(std::ostream& out, const std::vector<SweepRow>& rows, const std::vector<TraceRecord>& trace);

}  // namespace covplan
