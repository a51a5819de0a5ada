#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "covplan/config.hpp"
#include "covplan/harness.hpp"
#include "covplan/render.hpp"
#include "covplan/splash.hpp"
#include "covplan/split.hpp"
#include "covplan/trajectory.hpp"

namespace {

using namespace covplan;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNoPath = 3;
constexpr int kExitIo = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoPathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs a file operation, reporting any failure as an I/O error.
template <typename Fn>
auto io(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw UsageError(std::string("malformed ") + what + ": '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "config v1 file");
  cmd->add_option("--set", c.overrides, "key=value override (repeatable)");
}

PlannerConfig build_config(const Common& c) {
  PlannerConfig cfg;
  if (!c.config_path.empty()) {
    if (!std::filesystem::exists(c.config_path)) throw IoError("cannot open config file '" + c.config_path + "'");
    cfg = load_config(c.config_path);
  }
  for (const std::string& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + kv + "'");
    apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

PrimitiveLibrary library_for(const PlannerConfig& cfg, const std::string& prims_path) {
  if (prims_path.empty()) return generate_primitives(cfg.lattice);
  return io([&] { return load_primitives(prims_path); });
}

// ---------------------------------------------------------------------------

struct GenMapArgs {
  Common common;
  std::uint64_t seed = 1;
  int width = -1;
  int height = -1;
  int minutes = -1;
  int lifetime = -1;
  double nc_fraction = -1.0;
  int snapshots = 0;
  std::string times;
  std::string out_dir = ".";
  std::string prefix = "map";
};

int cmd_gen_map(const GenMapArgs& a) {
  const PlannerConfig cfg = build_config(a.common);
  MapGenParams p;
  p.seed = a.seed;
  p.width = a.width > 0 ? a.width : cfg.bench.width;
  p.height = a.height > 0 ? a.height : cfg.bench.height;
  p.cell_size = cfg.lattice.cell_size;
  p.lifetime = a.lifetime > 0 ? a.lifetime : cfg.bench.lifetime;
  p.nc_fraction = a.nc_fraction >= 0.0 ? a.nc_fraction : cfg.bench.nc_fraction;
  const int minutes = a.minutes > 0 ? a.minutes : cfg.bench.minutes;
  const int total = minutes * 60;

  std::vector<int> times;
  if (!a.times.empty() && a.snapshots != 0) throw UsageError("use either --snapshots or --times");
  if (!a.times.empty()) {
    times = parse_ints(a.times, "snapshot times");
  } else {
    const int n = a.snapshots == 0 ? 1 : a.snapshots;
    if (n < 0) throw UsageError("--snapshots must be positive");
    for (int k = 1; k <= n; ++k) times.push_back(static_cast<int>(std::lround(static_cast<double>(k) * total / n)));
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && times[i] <= times[i - 1])) {
      throw UsageError("snapshot times must be non-negative and strictly ascending");
    }
  }
  const auto maps = gen_decayed_map(p, times, cfg.sensor);
  io([&] {
    std::filesystem::create_directories(a.out_dir);
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const std::string path = (std::filesystem::path(a.out_dir) /
                                (a.prefix + "_t" + std::to_string(times[i]) + ".ccmap")).string();
      save_map(path, maps[i]);
      std::cout << path << '\n';
    }
    return 0;
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_gen_prims(const Common& common, const std::string& out) {
  const PlannerConfig cfg = build_config(common);
  const PrimitiveLibrary lib = generate_primitives(cfg.lattice);
  io([&] {
    save_primitives(out, lib);
    return 0;
  });
  std::cout << "primitives " << lib.size() << " average_out_degree " << lib.average_out_degree() << '\n';
  for (const std::string& w : lib.warnings()) std::cerr << "warning: " << w << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PlanArgs {
  Common common;
  std::string algo = "splash";
  std::string map_path;
  std::string prims_path;
  std::string start;
  std::string goal;
  int history = 0;
  double timeout = -1.0;
  int psi0 = -1;
  std::string out;
  std::string trace_out;
};

int cmd_plan(const PlanArgs& a) {
  const PlannerConfig cfg = build_config(a.common);
  const auto algo = parse_algorithm(a.algo);
  if (!algo) throw UsageError("unknown --algo '" + a.algo + "'");
  const CoverageMap map = io([&] { return load_map(a.map_path); });
  const PrimitiveLibrary lib = library_for(cfg, a.prims_path);

  const auto s = parse_ints(a.start, "start");
  if (s.size() < 2 || s.size() > 4) throw UsageError("--start expects x,y[,heading[,speed]] in cells");
  const RobotState start{s[0], s[1], s.size() > 2 ? s[2] : 0, s.size() > 3 ? s[3] : 0, 0};
  if (start.heading < 0 || start.heading >= lib.config().n_theta || start.speed < 0 ||
      start.speed >= lib.config().n_speeds()) {
    throw UsageError("start heading or speed out of range");
  }
  const auto g = parse_ints(a.goal, "goal");
  if (g.size() != 2) throw UsageError("--goal expects x,y in cells");
  const CellIndex goal{g[1], g[0]};
  if (!map.in_bounds(start.cell()) || !map.in_bounds(goal)) throw UsageError("start or goal outside the map");
  const int psi0 = resolve_psi0(a.psi0 >= 0 ? a.psi0 : cfg.splash.psi0, start, lib.config(), cfg.sensor);

  SweepRow row;
  row.algorithm = *algo;
  row.h = a.history;
  Trajectory traj;
  RefinementTrace trace;
  SearchStatus status = SearchStatus::NoPath;
  switch (*algo) {
    case Algorithm::Splash: {
      RobotSearchLimits limits;
      if (a.timeout > 0) {
        limits.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(a.timeout));
      }
      const SplashResult r = splash(start, goal, psi0, a.history, map, lib, cfg, limits);
      status = r.status;
      traj = r.trajectory;
      row.metrics.solution_g = r.sensor.shifted_cost;
      row.metrics.plan_wall_ms = r.wall_ms();
      row.metrics.expansions = r.robot.expansions + r.sensor.expansions;
      break;
    }
    case Algorithm::Split: {
      SplitLimits limits;
      limits.budget_s = a.timeout > 0 ? a.timeout : cfg.split.timeout_s;
      const SplitResult r = split(start, goal, psi0, map, lib, cfg, limits);
      status = r.status;
      traj = r.trajectory;
      trace = r.trace;
      row.h = 0;
      row.iteration = static_cast<int>(r.trace.rows.size());
      row.metrics.solution_g = r.final_cost;
      row.metrics.plan_wall_ms = r.wall_ms;
      row.metrics.expansions = r.expansions;
      break;
    }
    case Algorithm::JointBaseline: {
      BaselineLimits limits;
      limits.timeout_s = a.timeout > 0 ? a.timeout : cfg.baseline.timeout_s;
      const BaselineResult r = joint_baseline(start, goal, psi0, map, lib, cfg, limits);
      status = r.status;
      traj = r.trajectory;
      row.metrics.solution_g = r.cost;
      row.metrics.plan_wall_ms = r.wall_ms;
      row.metrics.expansions = r.expansions;
      break;
    }
  }
  if (status != SearchStatus::Found) {
    throw NoPathError(std::string(algorithm_name(*algo)) +
                      (status == SearchStatus::Timeout ? ": no path found before the time limit" : ": no path"));
  }

  const PlanMetrics m = evaluate(traj, map);
  row.metrics.n = m.n;
  row.metrics.sum_p = m.sum_p;
  row.metrics.motion_cost = m.motion_cost;
  if (!a.out.empty()) io([&] {
      save_trajectory(a.out, traj);
      return 0;
    });
  if (!a.trace_out.empty()) io([&] {
      std::ofstream f(a.trace_out);
      if (!f) throw std::runtime_error("cannot write trace file '" + a.trace_out + "'");
      write_trace_csv(f, trace);
      return 0;
    });
  write_results_header(std::cout);
  write_result_row(std::cout, row, false);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_render(const Common& common, const std::string& map_path, const std::string& traj_path,
               const std::string& out, int window, double scale) {
  const PlannerConfig cfg = build_config(common);
  const CoverageMap map = io([&] { return load_map(map_path); });
  Trajectory traj;
  traj.psi_bins = cfg.sensor.psi_bins;
  if (!traj_path.empty()) traj = io([&] { return load_trajectory(traj_path); });
  RenderOptions opts;
  opts.overlap_window = window;
  opts.pixels_per_meter = scale;
  const std::string svg = render_svg(map, traj, cfg.sensor, opts);
  io([&] {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    f << svg;
    return 0;
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  Common common;
  std::string prims_path;
  std::string histories = "0,3,5";
  std::string out;
  std::string trace_out;
  bool no_split = false;
  bool no_baseline = false;
  bool deterministic = false;
  int split_iterations = 3;
  std::size_t baseline_expansions = 200'000;
};

int cmd_bench(const BenchArgs& a) {
  PlannerConfig cfg = build_config(a.common);
  SweepOptions opts;
  opts.histories = parse_ints(a.histories, "history list");
  for (int h : opts.histories) {
    if (h < 0 || h > cfg.splash.h_max) throw UsageError("history sizes must be in [0, splash.h_max]");
  }
  opts.run_split = !a.no_split;
  opts.run_baseline = !a.no_baseline;
  opts.deterministic = a.deterministic;
  opts.split_iterations = a.split_iterations;
  opts.baseline_expansions = a.baseline_expansions;
  opts.jobs = cfg.bench.jobs;

  const PrimitiveLibrary lib = library_for(cfg, a.prims_path);
  const InstanceSet set = make_instance_set(cfg);

  std::ofstream file;
  std::ofstream trace_file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw IoError("cannot write '" + a.out + "'");
  }
  if (!a.trace_out.empty()) {
    trace_file.open(a.trace_out, std::ios::binary);
    if (!trace_file) throw IoError("cannot write '" + a.trace_out + "'");
    write_trace_header(trace_file);
  }
  std::ostream& csv = a.out.empty() ? std::cout : file;
  std::ostream& summary = a.out.empty() ? std::cerr : std::cout;

  std::vector<SweepRow> rows;
  std::vector<TraceRecord> trace;
  write_results_header(csv);
  run_sweep(set, lib, cfg, opts, [&](const InstanceResult& r) {
    for (const SweepRow& row : r.rows) write_result_row(csv, row, opts.deterministic);
    for (const TraceRecord& t : r.trace) {
      if (trace_file.is_open()) write_trace_record(trace_file, t, opts.deterministic);
    }
    csv.flush();
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    trace.insert(trace.end(), r.trace.begin(), r.trace.end());
  });
  write_summary(summary, rows, trace);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-aware robot and pan-sensor trajectory planner"};
  app.require_subcommand(1);

  GenMapArgs gm;
  auto* gen_map = app.add_subcommand("gen-map", "Generate decayed coverage maps");
  add_common(gen_map, gm.common);
  gen_map->add_option("--seed", gm.seed, "RNG seed");
  gen_map->add_option("--width", gm.width, "cells (default: bench.width)");
  gen_map->add_option("--height", gm.height, "cells (default: bench.height)");
  gen_map->add_option("--minutes", gm.minutes, "simulated minutes (default: bench.minutes)");
  gen_map->add_option("--lifetime", gm.lifetime, "mean cell lifetime in seconds");
  gen_map->add_option("--nc-fraction", gm.nc_fraction, "share of no-coverage cells");
  gen_map->add_option("--snapshots", gm.snapshots, "number of evenly spaced snapshots");
  gen_map->add_option("--times", gm.times, "explicit snapshot times in seconds, comma separated");
  gen_map->add_option("--out-dir", gm.out_dir, "output directory");
  gen_map->add_option("--prefix", gm.prefix, "file name prefix");

  Common gp_common;
  std::string gp_out;
  auto* gen_prims = app.add_subcommand("gen-prims", "Generate the motion primitive library");
  add_common(gen_prims, gp_common);
  gen_prims->add_option("--out", gp_out, "mprim v1 output file")->required();

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Plan one trajectory");
  add_common(plan, pa.common);
  plan->add_option("--algo", pa.algo, "splash | split | joint-baseline");
  plan->add_option("--map", pa.map_path, "ccmap v1 file")->required();
  plan->add_option("--prims", pa.prims_path, "mprim v1 file (default: generated from config)");
  plan->add_option("--start", pa.start, "x,y[,heading[,speed]] in cells and bins")->required();
  plan->add_option("--goal", pa.goal, "x,y in cells")->required();
  plan->add_option("--H", pa.history, "sensor history size (splash)");
  plan->add_option("--timeout", pa.timeout, "seconds (split budget, baseline timeout, splash deadline)");
  plan->add_option("--psi0", pa.psi0, "initial sensor bin (default: facing the start heading)");
  plan->add_option("--out", pa.out, "traj v1 output file");
  plan->add_option("--trace", pa.trace_out, "refinement trace CSV (split)");

  Common rd_common;
  std::string rd_map, rd_traj, rd_out;
  int rd_window = 1;
  double rd_scale = 6.0;
  auto* render = app.add_subcommand("render", "Render a map and trajectory to SVG");
  add_common(render, rd_common);
  render->add_option("--map", rd_map, "ccmap v1 file")->required();
  render->add_option("--traj", rd_traj, "traj v1 file (optional)");
  render->add_option("--out", rd_out, "SVG output file")->required();
  render->add_option("--window", rd_window, "overlap window in steps")->check(CLI::NonNegativeNumber);
  render->add_option("--scale", rd_scale, "pixels per meter")->check(CLI::PositiveNumber);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run the benchmark sweep");
  add_common(bench, ba.common);
  bench->add_option("--prims", ba.prims_path, "mprim v1 file (default: generated from config)");
  bench->add_option("--H", ba.histories, "comma-separated history sizes");
  bench->add_option("--out", ba.out, "results CSV (default: stdout)");
  bench->add_option("--trace-out", ba.trace_out, "refinement trace CSV");
  bench->add_flag("--no-split", ba.no_split, "skip the refinement planner");
  bench->add_flag("--no-baseline", ba.no_baseline, "skip the joint-space baseline");
  bench->add_flag("--deterministic", ba.deterministic, "iteration/expansion budgets instead of wall-clock limits");
  bench->add_option("--split-iterations", ba.split_iterations, "refinement iterations in deterministic mode");
  bench->add_option("--baseline-expansions", ba.baseline_expansions, "baseline expansions in deterministic mode");
  // Shorthands for the most common bench.* keys.
  for (const char* key : {"seed", "maps", "pairs", "jobs", "minutes", "width", "height"}) {
    bench->add_option_function<std::string>(
        std::string("--") + key,
        [&ba, key](const std::string& v) { ba.common.overrides.push_back(std::string("bench.") + key + "=" + v); },
        std::string("bench.") + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_map) return cmd_gen_map(gm);
    if (*gen_prims) return cmd_gen_prims(gp_common, gp_out);
    if (*plan) return cmd_plan(pa);
    if (*render) return cmd_render(rd_common, rd_map, rd_traj, rd_out, rd_window, rd_scale);
    if (*bench) return cmd_bench(ba);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NoPathError& e) {
    std::cerr << "no path: " << e.what() << '\n';
    return kExitNoPath;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
