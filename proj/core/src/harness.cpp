#include "covplan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <thread>
#include <unordered_set>

namespace covplan {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Point {
  double x;
  double y;
};

// Closed back-and-forth lane pattern, traversed at constant speed.
class SweepPath {
 public:
  SweepPath(double extent_x, double extent_y, double spacing, bool along_x) {
    const double span = along_x ? extent_x : extent_y;
    const double across = along_x ? extent_y : extent_x;
    std::vector<Point> lanes;
    for (int j = 0; (j + 0.5) * spacing < across; ++j) {
      const double c = (j + 0.5) * spacing;
      const bool forward = j % 2 == 0;
      const double a = forward ? 0.0 : span;
      const double b = forward ? span : 0.0;
      lanes.push_back(along_x ? Point{a, c} : Point{c, a});
      lanes.push_back(along_x ? Point{b, c} : Point{c, b});
    }
    points_ = lanes;
    points_.insert(points_.end(), lanes.rbegin() + 1, lanes.rend());
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      cumulative_.push_back(cumulative_.back() +
                            std::hypot(points_[i].x - points_[i - 1].x, points_[i].y - points_[i - 1].y));
    }
  }

  [[nodiscard]] double length() const noexcept { return cumulative_.back(); }

  // Position and travel direction at arc length s (wrapped).
  void sample(double s, double& x, double& y, double& heading) const {
    s = std::fmod(s, length());
    if (s < 0) s += length();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    i = std::clamp<std::size_t>(i, 1, points_.size() - 1);
    // Skip zero-length joints.
    while (i + 1 < points_.size() && cumulative_[i] == cumulative_[i - 1]) ++i;
    const Point& a = points_[i - 1];
    const Point& b = points_[i];
    const double seg = cumulative_[i] - cumulative_[i - 1];
    const double u = seg > 0 ? (s - cumulative_[i - 1]) / seg : 0.0;
    x = a.x + u * (b.x - a.x);
    y = a.y + u * (b.y - a.y);
    heading = std::atan2(b.y - a.y, b.x - a.x);
  }

 private:
  std::vector<Point> points_;
  std::vector<double> cumulative_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string cost_text(Cost c) {
  const bool neg = c < 0;
  const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(c + 1)) + 1 : static_cast<std::uint64_t>(c);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%llu.%06llu", neg ? "-" : "", static_cast<unsigned long long>(mag / kCostScale),
                static_cast<unsigned long long>(mag % kCostScale));
  return buf;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::vector<CoverageMap> gen_decayed_map(const MapGenParams& params, const std::vector<int>& snapshot_times,
                                         const SensorGeometry& geom) {
  if (params.width <= 0 || params.height <= 0 || !(params.cell_size > 0.0)) {
    throw MapError("map dimensions must be positive");
  }
  if (params.lifetime <= 0) throw MapError("lifetime must be positive");
  if (!(params.nc_fraction >= 0.0 && params.nc_fraction < 1.0)) throw MapError("no-coverage fraction must be in [0, 1)");
  if (!(params.sweep_speed > 0.0)) throw MapError("sweep speed must be positive");
  if (params.lifetime_block <= 0) throw MapError("lifetime block must be positive");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (snapshot_times[i] < 0 || (i > 0 && snapshot_times[i] < snapshot_times[i - 1])) {
      throw MapError("snapshot times must be non-negative and ascending");
    }
  }

  std::mt19937_64 rng(params.seed);
  CoverageMap map(params.width, params.height, params.cell_size, params.lifetime);

  const int lo = std::max(1, params.lifetime / 2);
  const int hi = std::max(lo, params.lifetime + params.lifetime / 2);
  std::uniform_int_distribution<int> life(lo, hi);
  for (int br = 0; br < params.height; br += params.lifetime_block) {
    for (int bc = 0; bc < params.width; bc += params.lifetime_block) {
      const int l = life(rng);
      for (int r = br; r < std::min(params.height, br + params.lifetime_block); ++r) {
        for (int c = bc; c < std::min(params.width, bc + params.lifetime_block); ++c) {
          map.set_cell({r, c}, {Zone::Coverage, l, 0});
        }
      }
    }
  }

  const auto total = static_cast<std::size_t>(params.width) * static_cast<std::size_t>(params.height);
  const auto target = static_cast<std::size_t>(std::ceil(params.nc_fraction * static_cast<double>(total)));
  std::size_t nc = 0;
  const int max_side = std::max(1, std::min(params.width, params.height) / 6);
  std::uniform_int_distribution<int> side(std::max(1, max_side / 4), max_side);
  std::uniform_int_distribution<int> row0(0, params.height - 1);
  std::uniform_int_distribution<int> col0(0, params.width - 1);
  while (nc < target) {
    const int h = side(rng), w = side(rng), r0 = row0(rng), c0 = col0(rng);
    for (int r = r0; r < std::min(params.height, r0 + h) && nc < target; ++r) {
      for (int c = c0; c < std::min(params.width, c0 + w) && nc < target; ++c) {
        if (map.cell({r, c}).zone == Zone::NoCoverage) continue;
        map.set_cell({r, c}, {Zone::NoCoverage, 0, 0});
        ++nc;
      }
    }
  }

  const double ex = params.width * params.cell_size, ey = params.height * params.cell_size;
  const bool along_x = (rng() & 1U) == 0;
  const SweepPath path(ex, ey, geom.rect_width, along_x);
  const double offset = std::uniform_real_distribution<double>(0.0, path.length())(rng);

  std::vector<CoverageMap> out;
  std::size_t next = 0;
  auto emit = [&](int t) {
    while (next < snapshot_times.size() && snapshot_times[next] == t) {
      out.push_back(map);
      ++next;
    }
  };
  emit(0);
  const int end = snapshot_times.empty() ? 0 : snapshot_times.back();
  for (int t = 1; t <= end; ++t) {
    map.decay(1);
    double x = 0, y = 0, heading = 0;
    path.sample(offset + params.sweep_speed * t, x, y, heading);
    const auto cells = rasterize_rectangle(params.width, params.height, params.cell_size,
                                           x + geom.offset * std::cos(heading), y + geom.offset * std::sin(heading),
                                           geom.rect_length, geom.rect_width, heading);
    map.mark_covered(cells);
    emit(t);
  }
  return out;
}

PlanMetrics evaluate(const Trajectory& traj, const CoverageMap& map) {
  PlanMetrics m;
  m.motion_cost = traj.motion_cost;
  if (traj.empty()) return m;
  const int t0 = traj.steps.front().t;
  std::unordered_set<CellIndex, CellIndexHash> seen;
  for (const TrajectoryStep& s : traj.steps) {
    for (CellIndex c : s.footprint) {
      if (!map.in_bounds(c) || !map.in_coverage_zone(c)) continue;
      if (!seen.insert(c).second) continue;
      ++m.n;
      m.sum_p += map.priority(c) - (s.t - t0);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

InstanceSet make_instances_on(std::vector<CoverageMap> maps, const PlannerConfig& config) {
  const BenchConfig& b = config.bench;
  InstanceSet set;
  set.seed = b.seed;
  set.pairs_per_map = b.pairs;
  set.maps = std::move(maps);
  std::mt19937_64 rng(splitmix(b.seed ^ 0x1A57A9CEULL));
  int id = 0;
  for (int m = 0; m < static_cast<int>(set.maps.size()); ++m) {
    const CoverageMap& map = set.maps[static_cast<std::size_t>(m)];
    const double cs = map.cell_size();
    const int margin = std::min({2, map.width() / 4, map.height() / 4});
    std::uniform_int_distribution<int> sx(margin, map.width() - 1 - margin), sy(margin, map.height() - 1 - margin);
    std::uniform_int_distribution<int> gx(0, map.width() - 1), gy(0, map.height() - 1);
    std::uniform_int_distribution<int> hd(0, config.lattice.n_theta - 1);
    for (int k = 0; k < b.pairs; ++k) {
      Instance inst;
      inst.id = id++;
      inst.map_index = m;
      inst.start = {sx(rng), sy(rng), hd(rng), 0, 0};
      for (int attempt = 0;; ++attempt) {
        inst.goal = {gy(rng), gx(rng)};
        const double d = std::hypot(inst.goal.col - inst.start.cx, inst.goal.row - inst.start.cy) * cs;
        if (d >= b.min_separation && inst.goal != inst.start.cell()) break;
        if (attempt > 10000) throw std::invalid_argument("cannot place goal at the requested separation");
      }
      inst.psi0 = resolve_psi0(config.splash.psi0, inst.start, config.lattice, config.sensor);
      set.instances.push_back(inst);
    }
  }
  return set;
}

InstanceSet make_instance_set(const PlannerConfig& config) {
  const BenchConfig& b = config.bench;
  if (b.maps <= 0 || b.pairs <= 0) throw std::invalid_argument("bench needs at least one map and one pair");
  std::vector<CoverageMap> maps;
  for (int m = 0; m < b.maps; ++m) {
    MapGenParams p;
    p.seed = splitmix(b.seed + static_cast<std::uint64_t>(m));
    p.width = b.width;
    p.height = b.height;
    p.cell_size = config.lattice.cell_size;
    p.lifetime = b.lifetime;
    p.nc_fraction = b.nc_fraction;
    auto snaps = gen_decayed_map(p, {b.minutes * 60}, config.sensor);
    maps.push_back(std::move(snaps.front()));
  }
  return make_instances_on(std::move(maps), config);
}

// ---------------------------------------------------------------------------

const char* algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Splash: return "splash";
    case Algorithm::Split: return "split";
    case Algorithm::JointBaseline: return "joint-baseline";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) noexcept {
  if (name == "splash") return Algorithm::Splash;
  if (name == "split") return Algorithm::Split;
  if (name == "joint-baseline") return Algorithm::JointBaseline;
  return std::nullopt;
}

namespace {

std::string status_error(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "";
    case SearchStatus::NoPath: return "no-path";
    case SearchStatus::Timeout: return "timeout";
  }
  return "unknown";
}

template <typename Fn>
void guarded(SweepRow& row, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    row.error = std::string("exception: ") + e.what();
  }
}

}  // namespace

InstanceResult run_instance(const Instance& inst, const CoverageMap& map, const PrimitiveLibrary& lib,
                            const PlannerConfig& config, const SweepOptions& options) {
  InstanceResult out;
  for (int h : options.histories) {
    SweepRow row;
    row.instance_id = inst.id;
    row.algorithm = Algorithm::Splash;
    row.h = h;
    guarded(row, [&] {
      const SplashResult r = splash(inst.start, inst.goal, inst.psi0, h, map, lib, config);
      row.error = status_error(r.status);
      row.metrics.plan_wall_ms = r.wall_ms();
      row.metrics.expansions = r.robot.expansions + r.sensor.expansions;
      if (!r.found()) return;
      const double wall = row.metrics.plan_wall_ms;
      const std::size_t exp = row.metrics.expansions;
      row.metrics = evaluate(r.trajectory, map);
      row.metrics.solution_g = r.sensor.shifted_cost;
      row.metrics.plan_wall_ms = wall;
      row.metrics.expansions = exp;
    });
    out.rows.push_back(std::move(row));
  }

  if (options.run_split) {
    SweepRow row;
    row.instance_id = inst.id;
    row.algorithm = Algorithm::Split;
    guarded(row, [&] {
      SplitLimits limits;
      limits.budget_s = options.deterministic ? 0.0 : config.split.timeout_s;
      limits.max_iterations = options.deterministic ? options.split_iterations : 0;
      const SplitResult r = split(inst.start, inst.goal, inst.psi0, map, lib, config, limits);
      row.error = status_error(r.status);
      if (!r.found()) {
        row.metrics.plan_wall_ms = r.wall_ms;
        return;
      }
      row.metrics = evaluate(r.trajectory, map);
      row.metrics.solution_g = r.final_cost;
      row.metrics.plan_wall_ms = r.wall_ms;
      row.metrics.expansions = r.expansions;
      row.iteration = static_cast<int>(r.trace.rows.size());
      double cumulative = r.t_splash_ms;
      for (const TraceRow& tr : r.trace.rows) {
        cumulative += tr.wall_ms;
        out.trace.push_back({inst.id, tr, cumulative});
      }
    });
    out.rows.push_back(std::move(row));
  }

  if (options.run_baseline) {
    SweepRow row;
    row.instance_id = inst.id;
    row.algorithm = Algorithm::JointBaseline;
    guarded(row, [&] {
      BaselineLimits limits;
      limits.timeout_s = options.deterministic ? 0.0 : config.baseline.timeout_s;
      if (options.deterministic) limits.max_expansions = options.baseline_expansions;
      const BaselineResult r = joint_baseline(inst.start, inst.goal, inst.psi0, map, lib, config, limits);
      row.error = status_error(r.status);
      row.metrics.plan_wall_ms = r.wall_ms;
      row.metrics.expansions = r.expansions;
      if (!r.found()) return;
      row.metrics = evaluate(r.trajectory, map);
      row.metrics.solution_g = r.cost;
      row.metrics.plan_wall_ms = r.wall_ms;
      row.metrics.expansions = r.expansions;
    });
    out.rows.push_back(std::move(row));
  }
  return out;
}

void run_sweep(const InstanceSet& set, const PrimitiveLibrary& lib, const PlannerConfig& config,
               const SweepOptions& options, const std::function<void(const InstanceResult&)>& sink) {
  const std::size_t n = set.instances.size();
  std::vector<std::optional<InstanceResult>> done(n);
  std::mutex mu;
  std::size_t next_out = 0;
  std::atomic<std::size_t> next_in{0};

  auto worker = [&] {
    for (std::size_t i = next_in++; i < n; i = next_in++) {
      const Instance& inst = set.instances[i];
      InstanceResult r = run_instance(inst, set.maps.at(static_cast<std::size_t>(inst.map_index)), lib, config, options);
      std::lock_guard lock(mu);
      done[i] = std::move(r);
      while (next_out < n && done[next_out]) {
        sink(*done[next_out]);
        done[next_out].reset();
        ++next_out;
      }
    }
  };

  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (jobs == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

void write_results_header(std::ostream& out) {
  out << "instance_id,algorithm,H,iteration,N,sum_p,p_bar,solution_g,motion_cost_s,plan_wall_ms,expansions,error\n";
}

void write_result_row(std::ostream& out, const SweepRow& row, bool deterministic) {
  const PlanMetrics& m = row.metrics;
  const auto pb = m.p_bar();
  out << row.instance_id << ',' << algorithm_name(row.algorithm) << ',';
  if (row.algorithm != Algorithm::JointBaseline) out << row.h;
  out << ',' << row.iteration << ',' << m.n << ',' << m.sum_p << ',' << (pb ? fixed(*pb, 6) : "") << ','
      << cost_text(m.solution_g) << ',' << fixed(m.motion_cost, 1) << ','
      << fixed(deterministic ? 0.0 : m.plan_wall_ms, 3) << ',' << m.expansions << ',' << csv_safe(row.error) << '\n';
}

void write_trace_header(std::ostream& out) {
  out << "instance_id,iteration,cost,expansions,wall_ms,tunnel_states,coverage_cost,cumulative_ms\n";
}

void write_trace_record(std::ostream& out, const TraceRecord& rec, bool deterministic) {
  const TraceRow& r = rec.row;
  out << rec.instance_id << ',' << r.iteration << ',' << cost_text(r.cost) << ',' << r.expansions << ','
      << fixed(deterministic ? 0.0 : r.wall_ms, 3) << ',' << r.tunnel_states << ',' << cost_text(r.coverage_cost)
      << ',' << fixed(deterministic ? 0.0 : rec.cumulative_ms, 3) << '\n';
}

// ---------------------------------------------------------------------------

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sign test needs paired samples");
  SignTest t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) ++t.plus;
    else if (a[i] < b[i]) ++t.minus;
    else ++t.ties;
  }
  const int n = t.plus + t.minus;
  if (n == 0) return t;
  const int k = std::min(t.plus, t.minus);
  double tail = 0.0;
  for (int i = 0; i <= k; ++i) {
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  }
  t.p_value = std::min(1.0, 2.0 * tail);
  return t;
}

void write_summary(std::ostream& out, const std::vector<SweepRow>& rows, const std::vector<TraceRecord>& trace) {
  // Keyed by (algorithm, H); the baseline uses H = -1.
  std::map<std::pair<int, int>, std::vector<const SweepRow*>> groups;
  for (const SweepRow& r : rows) {
    const int h = r.algorithm == Algorithm::JointBaseline ? -1 : r.h;
    groups[{static_cast<int>(r.algorithm), h}].push_back(&r);
  }
  out << "# summary\n";
  for (const auto& [key, members] : groups) {
    std::vector<double> n, wall;
    int failures = 0;
    for (const SweepRow* r : members) {
      if (!r->error.empty()) {
        ++failures;
        continue;
      }
      n.push_back(static_cast<double>(r->metrics.n));
      wall.push_back(r->metrics.plan_wall_ms);
    }
    out << algorithm_name(static_cast<Algorithm>(key.first));
    if (key.second >= 0) out << " H=" << key.second;
    out << ": runs=" << members.size() << " failures=" << failures << " median_N=" << fixed(median(n), 1)
        << " median_wall_ms=" << fixed(median(wall), 3) << '\n';
  }

  std::map<int, std::map<int, double>> splash_n;  // H -> instance -> N
  for (const SweepRow& r : rows) {
    if (r.algorithm == Algorithm::Splash && r.error.empty()) splash_n[r.h][r.instance_id] = static_cast<double>(r.metrics.n);
  }
  if (splash_n.count(0) != 0) {
    for (const auto& [h, by_instance] : splash_n) {
      if (h == 0) continue;
      std::vector<double> a, b;
      for (const auto& [id, n] : by_instance) {
        const auto it = splash_n[0].find(id);
        if (it == splash_n[0].end()) continue;
        a.push_back(n);
        b.push_back(it->second);
      }
      const SignTest t = sign_test(a, b);
      out << "sign test N(H=" << h << ") vs N(H=0): plus=" << t.plus << " minus=" << t.minus << " ties=" << t.ties
          << " p=" << fixed(t.p_value, 6) << '\n';
    }
  }

  std::map<int, int> within;
  for (const TraceRecord& rec : trace) {
    within.try_emplace(rec.instance_id, 0);
    if (rec.cumulative_ms <= 5000.0) ++within[rec.instance_id];
  }
  if (!within.empty()) {
    std::vector<double> counts;
    for (const auto& [id, c] : within) counts.push_back(c);
    out << "split iterations finished within 5 s: median=" << fixed(median(counts), 1) << '\n';
  }
}

}  // namespace covplan
