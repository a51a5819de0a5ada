#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "covplan/costs.hpp"
#include "covplan/footprint.hpp"
#include "covplan/lattice.hpp"

namespace covplan {

struct SearchConfig {
  double w1 = 2.0;  // heuristic inflation
  double w2 = 2.0;  // anchor gate
  int t_max = 200;  // seconds; states past the horizon are pruned
  double r_min = 20.0;
  int dubins_headings = 16;
};

struct SplashConfig {
  int h_max = 5;
  int psi0 = -1;  // -1: nearest bin to the start heading
};

struct SplitConfig {
  double timeout_s = 30.0;
  bool reanchor = false;     // seed tunnels from the incumbent instead of the initial path
  bool strict_goal = false;  // goal must equal the reference path's final joint state
  int joint_history = 0;     // sensor history inside the joint space (hook; only 0 is supported)
  std::size_t max_nodes = 6'000'000;
};

struct BaselineConfig {
  double timeout_s = 20.0;
  std::size_t max_nodes = 6'000'000;
};

struct BenchConfig {
  std::uint64_t seed = 1;
  int maps = 20;
  int pairs = 10;
  int width = 100;
  int height = 100;
  int minutes = 10;
  int lifetime = 300;
  double nc_fraction = 0.15;
  double min_separation = 30.0;  // meters between start and goal
  int jobs = 0;                  // 0: hardware concurrency
};

struct PlannerConfig {
  LatticeConfig lattice;
  SensorGeometry sensor;
  CostParams cost;
  SearchConfig search;
  SplashConfig splash;
  SplitConfig split;
  BaselineConfig baseline;
  BenchConfig bench;

  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `config v1` header followed by `key=value` lines; `#` starts a comment.
/// Unset keys keep their defaults, unknown keys are rejected.
[[nodiscard]] PlannerConfig parse_config(std::istream& in);
[[nodiscard]] PlannerConfig load_config(const std::string& path);
/// Applies one `key=value` override (used by the CLI's --set).
void apply_config_entry(PlannerConfig& cfg, const std::string& key, const std::string& value);
/// Normalized form: every key, sorted, shortest round-trip number formatting.
[[nodiscard]] std::string serialize_config(const PlannerConfig& cfg);

}  // namespace covplan
