#pragma once

#include <compare>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "covplan/coverage_map.hpp"

namespace covplan {

struct LatticeConfig {
  int n_theta = 16;
  std::vector<double> speeds{0.0, 5.0, 10.0};  // m/s, ascending
  double accel_max = 2.5;                      // m/s^2
  double turn_rate_max = 0.5;                  // rad/s
  int duration = 4;                            // seconds per primitive
  double cell_size = 1.0;                      // lattice position resolution
  int max_heading_change = 2;                  // bins
  double dense_dt = 0.1;                       // spacing of rendering samples

  [[nodiscard]] double heading_angle(int bin) const noexcept;
  [[nodiscard]] double max_speed() const noexcept { return speeds.empty() ? 0.0 : speeds.back(); }
  [[nodiscard]] int n_speeds() const noexcept { return static_cast<int>(speeds.size()); }
  void validate() const;
};

/// Lattice node: cell-centered position, heading bin, speed level and the
/// integral timestamp at which it is reached.
struct RobotState {
  int cx = 0;
  int cy = 0;
  int heading = 0;
  int speed = 0;
  int t = 0;

  [[nodiscard]] double x(double cell_size) const noexcept { return (cx + 0.5) * cell_size; }
  [[nodiscard]] double y(double cell_size) const noexcept { return (cy + 0.5) * cell_size; }
  [[nodiscard]] CellIndex cell() const noexcept { return {cy, cx}; }

  friend constexpr auto operator<=>(const RobotState&, const RobotState&) = default;
};

/// Pose relative to the primitive's start cell center.
struct PoseSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
};

/// Fixed-duration maneuver. The body follows constant tangential acceleration
/// and constant turn rate; a symmetric bang-bang acceleration (corr on the first
/// half, -corr on the second) moves the endpoint onto the lattice without
/// changing the final velocity.
struct MotionPrimitive {
  int id = 0;  // index within its (start_heading, start_speed) bucket
  int start_heading = 0;
  int start_speed = 0;
  int dx = 0;  // cells
  int dy = 0;
  int end_heading = 0;
  int end_speed = 0;
  int duration = 4;
  double accel = 0.0;
  double turn_rate = 0.0;
  double corr_x = 0.0;
  double corr_y = 0.0;
  std::vector<PoseSample> poses_1s;     // t = 1 .. duration
  std::vector<PoseSample> dense_poses;  // t = 0 .. duration at dense_dt

  [[nodiscard]] bool is_wait() const noexcept {
    return dx == 0 && dy == 0 && start_heading == end_heading && start_speed == end_speed;
  }
};

/// Closed-form pose of a primitive's profile at time t (start at the origin).
[[nodiscard]] PoseSample evaluate_profile(double theta0, double v0, double accel, double turn_rate, double corr_x,
                                          double corr_y, double duration, double t);

class PrimitiveLibrary {
 public:
  PrimitiveLibrary() = default;
  explicit PrimitiveLibrary(LatticeConfig config);

  [[nodiscard]] const LatticeConfig& config() const noexcept { return config_; }
  [[nodiscard]] const std::vector<MotionPrimitive>& from(int heading, int speed) const;
  [[nodiscard]] const MotionPrimitive& at(int heading, int speed, int id) const { return from(heading, speed).at(id); }
  void add(MotionPrimitive p);

  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] double average_out_degree() const noexcept;
  /// Largest endpoint displacement per second over all primitives (m/s).
  [[nodiscard]] double max_displacement_rate() const noexcept;
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  [[nodiscard]] std::size_t bucket(int heading, int speed) const;

  LatticeConfig config_;
  std::vector<std::vector<MotionPrimitive>> buckets_;
  std::vector<std::string> warnings_;
};

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Straight trims, heading changes up to max_heading_change bins and speed
/// changes of one level, for every (heading, speed) pair. Infeasible
/// maneuvers are dropped with a warning; an empty library throws.
[[nodiscard]] PrimitiveLibrary generate_primitives(const LatticeConfig& config);

/// Re-simulates a primitive and checks acceleration/turn-rate bounds, endpoint
/// snapping and sample consistency. Returns an empty string when valid.
[[nodiscard]] std::string check_primitive(const MotionPrimitive& p, const LatticeConfig& config);

struct RobotSuccessor {
  RobotState state;
  const MotionPrimitive* primitive = nullptr;
};

/// Extra rejection hook for successor states (obstacles, reservations).
using StateFilter = std::function<bool(const RobotState&)>;

/// Applies every primitive of s's bucket; successors whose 1 s waypoints leave
/// the map, or that the filter rejects, are discarded.
[[nodiscard]] std::vector<RobotSuccessor> robot_successors(const RobotState& s, const PrimitiveLibrary& lib,
                                                           const CoverageMap& map, const StateFilter& filter = {});

/// Motion cost: execution time in seconds.
[[nodiscard]] inline int primitive_cost(const MotionPrimitive& p) noexcept { return p.duration; }

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  int t = 0;
};

[[nodiscard]] Waypoint waypoint_at(const MotionPrimitive& p, const RobotState& anchor, int tick, double cell_size);
/// Per-second poses of p anchored at `anchor` (t = anchor.t + 1 ... + duration).
[[nodiscard]] std::vector<Waypoint> waypoints_1s(const MotionPrimitive& p, const RobotState& anchor,
                                                 double cell_size);
[[nodiscard]] Waypoint lattice_waypoint(const RobotState& s, const LatticeConfig& config);

// `mprim v1` text format.
void write_primitives(std::ostream& out, const PrimitiveLibrary& lib);
[[nodiscard]] PrimitiveLibrary read_primitives(std::istream& in);
[[nodiscard]] PrimitiveLibrary load_primitives(const std::string& path);
void save_primitives(const std::string& path, const PrimitiveLibrary& lib);

}  // namespace covplan
