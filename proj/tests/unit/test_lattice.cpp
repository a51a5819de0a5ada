#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "covplan/lattice.hpp"

using namespace covplan;

namespace {

const PrimitiveLibrary& default_lib() {
  static const PrimitiveLibrary lib = generate_primitives(LatticeConfig{});
  return lib;
}

// RK4 over (x, y, theta, v, cvx, cvy); the correction velocity (cvx, cvy)
// integrates +corr on the first half and -corr on the second.
std::array<double, 2> resimulate(const MotionPrimitive& p, const LatticeConfig& cfg, double t_end) {
  using S = std::array<double, 6>;
  const double half = 0.5 * p.duration;
  auto f = [&](const S& s, double t) {
    const double sign = t < half ? 1.0 : -1.0;
    return S{s[3] * std::cos(s[2]) + s[4], s[3] * std::sin(s[2]) + s[5], p.turn_rate, p.accel, sign * p.corr_x,
             sign * p.corr_y};
  };
  S s{0.0, 0.0, cfg.heading_angle(p.start_heading), cfg.speeds[static_cast<std::size_t>(p.start_speed)], 0.0, 0.0};
  constexpr double h = 1e-3;
  const int steps = static_cast<int>(std::llround(t_end / h));
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    // Evaluate every stage on the side of the switch this step lies on.
    const double mid = t + 0.5 * h;
    auto g = [&](const S& st, double) { return f(st, mid); };
    auto add = [](const S& a, const S& b, double k) {
      S r;
      for (std::size_t j = 0; j < 6; ++j) r[j] = a[j] + k * b[j];
      return r;
    };
    const S k1 = g(s, t);
    const S k2 = g(add(s, k1, 0.5 * h), t + 0.5 * h);
    const S k3 = g(add(s, k2, 0.5 * h), t + 0.5 * h);
    const S k4 = g(add(s, k3, h), t + h);
    for (std::size_t j = 0; j < 6; ++j) s[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return {s[0], s[1]};
}

}  // namespace

TEST(Lattice, ZeroSpeedHasWaitPrimitive) {
  const auto& lib = default_lib();
  for (int h = 0; h < lib.config().n_theta; ++h) {
    int waits = 0;
    for (const MotionPrimitive& p : lib.from(h, 0)) {
      if (p.is_wait()) {
        ++waits;
        EXPECT_EQ(p.duration, 4);
        EXPECT_EQ(primitive_cost(p), 4);
      }
    }
    EXPECT_EQ(waits, 1) << "heading " << h;
  }
}

TEST(Lattice, StraightTrimAtTopSpeedMovesFortyMeters) {
  const auto& lib = default_lib();
  const LatticeConfig& cfg = lib.config();
  for (int h : {0, 4, 8, 12}) {
    bool found = false;
    for (const MotionPrimitive& p : lib.from(h, 2)) {
      if (p.end_heading != h || p.end_speed != 2 || p.turn_rate != 0.0) continue;
      found = true;
      const double a = cfg.heading_angle(h);
      EXPECT_NEAR(p.dx, 40 * std::cos(a), 1e-9);
      EXPECT_NEAR(p.dy, 40 * std::sin(a), 1e-9);
      // Collinear, evenly spaced waypoints.
      for (int s = 1; s <= 4; ++s) {
        EXPECT_NEAR(p.poses_1s[s - 1].x, 10.0 * s * std::cos(a), 1e-9);
        EXPECT_NEAR(p.poses_1s[s - 1].y, 10.0 * s * std::sin(a), 1e-9);
      }
    }
    EXPECT_TRUE(found) << "heading " << h;
  }
}

TEST(Lattice, AverageOutDegreeNearTwelve) {
  EXPECT_NEAR(default_lib().average_out_degree(), 12.0, 2.0);
  EXPECT_TRUE(default_lib().warnings().empty());
}

TEST(Lattice, EveryPrimitivePassesFeasibilityReplay) {
  const auto& lib = default_lib();
  for (int h = 0; h < lib.config().n_theta; ++h) {
    for (int v = 0; v < lib.config().n_speeds(); ++v) {
      for (const MotionPrimitive& p : lib.from(h, v)) {
        EXPECT_EQ(check_primitive(p, lib.config()), "") << "h=" << h << " v=" << v << " id=" << p.id;
        EXPECT_EQ(p.duration, 4);
        EXPECT_LE(std::abs(p.end_speed - p.start_speed), 1);
      }
    }
  }
}

TEST(Lattice, WaypointsMatchRk4Resimulation) {
  const auto& lib = default_lib();
  const LatticeConfig& cfg = lib.config();
  const RobotState anchor{50, 50, 0, 0, 8};
  for (int h = 0; h < cfg.n_theta; h += 3) {
    for (int v = 0; v < cfg.n_speeds(); ++v) {
      RobotState a = anchor;
      a.heading = h;
      a.speed = v;
      for (const MotionPrimitive& p : lib.from(h, v)) {
        const auto wps = waypoints_1s(p, a, cfg.cell_size);
        ASSERT_EQ(wps.size(), 4U);
        for (int s = 1; s <= 4; ++s) {
          const auto ref = resimulate(p, cfg, s);
          EXPECT_NEAR(wps[s - 1].x - a.x(cfg.cell_size), ref[0], 1e-6);
          EXPECT_NEAR(wps[s - 1].y - a.y(cfg.cell_size), ref[1], 1e-6);
          EXPECT_EQ(wps[s - 1].t, a.t + s);
        }
      }
    }
  }
}

TEST(Lattice, SuccessorsMidMapAllFourSecondsLater) {
  const auto& lib = default_lib();
  const CoverageMap map(100, 100, 1.0, 10);
  const RobotState s{50, 50, 3, 1, 12};
  const auto succ = robot_successors(s, lib, map);
  EXPECT_EQ(succ.size(), lib.from(3, 1).size());
  for (const auto& r : succ) {
    EXPECT_EQ(r.state.t, 16);
    EXPECT_EQ(r.state.heading, r.primitive->end_heading);
    EXPECT_EQ(r.state.cx, s.cx + r.primitive->dx);
  }
}

TEST(Lattice, CornerFacingOutwardHasFewerSuccessors) {
  const auto& lib = default_lib();
  const CoverageMap map(100, 100, 1.0, 10);
  const RobotState mid{50, 50, 10, 2, 0};
  const RobotState corner{1, 1, 10, 2, 0};  // heading 10 of 16 points down-left
  EXPECT_LT(robot_successors(corner, lib, map).size(), robot_successors(mid, lib, map).size());
}

TEST(Lattice, FilterRejectsSuccessors) {
  const auto& lib = default_lib();
  const CoverageMap map(100, 100, 1.0, 10);
  const RobotState s{50, 50, 0, 1, 0};
  const auto none = robot_successors(s, lib, map, [](const RobotState&) { return false; });
  EXPECT_TRUE(none.empty());
}

TEST(Lattice, PathCostIsFourPerPrimitive) {
  const auto& lib = default_lib();
  int total = 0;
  for (int i = 0; i < 5; ++i) total += primitive_cost(lib.from(0, 1).at(0));
  EXPECT_EQ(total, 20);
}

TEST(Lattice, RejectsBadConfig) {
  LatticeConfig c;
  c.speeds = {5.0, 0.0};
  EXPECT_THROW(c.validate(), LatticeError);
  c = LatticeConfig{};
  c.n_theta = 3;
  EXPECT_THROW(c.validate(), LatticeError);
}

TEST(LatticeIo, RoundTrip) {
  const auto& lib = default_lib();
  std::stringstream s;
  write_primitives(s, lib);
  const PrimitiveLibrary back = read_primitives(s);
  ASSERT_EQ(back.size(), lib.size());
  for (int h = 0; h < lib.config().n_theta; ++h) {
    for (int v = 0; v < lib.config().n_speeds(); ++v) {
      const auto& a = lib.from(h, v);
      const auto& b = back.from(h, v);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].dx, b[i].dx);
        EXPECT_EQ(a[i].dy, b[i].dy);
        EXPECT_EQ(a[i].end_heading, b[i].end_heading);
        EXPECT_EQ(a[i].end_speed, b[i].end_speed);
        EXPECT_DOUBLE_EQ(a[i].turn_rate, b[i].turn_rate);
        ASSERT_EQ(a[i].poses_1s.size(), b[i].poses_1s.size());
        EXPECT_NEAR(a[i].poses_1s.back().x, b[i].poses_1s.back().x, 1e-12);
      }
    }
  }
}

TEST(LatticeIo, RejectsUnknownVersion) {
  std::istringstream in("mprim v9\n");
  EXPECT_THROW((void)read_primitives(in), LatticeError);
}
