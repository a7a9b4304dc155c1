#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <numbers>
#include <vector>

#include "pogosim/demos.hpp"
#include "pogosim/world.hpp"
#include "test_programs.hpp"

using namespace pogosim;

namespace {

// Breadth-first hop distances on the unit disk graph.
std::vector<int> bfs_hops(const std::vector<Vec2>& pts, double range, std::size_t seed) {
  std::vector<int> d(pts.size(), -1);
  std::deque<std::size_t> q{seed};
  d[seed] = 0;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop_front();
    for (std::size_t v = 0; v < pts.size(); ++v) {
      if (d[v] < 0 && std::hypot(pts[u].x - pts[v].x, pts[u].y - pts[v].y) <= range) {
        d[v] = d[u] + 1;
        q.push_back(v);
      }
    }
  }
  return d;
}

std::vector<int> run_hops(const std::vector<Vec2>& pts, std::size_t seed, int ticks) {
  WorldConfig cfg = fixtures::empty_world(2.0, 2.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    RobotSpec r = fixtures::robot_at(pts[i].x, pts[i].y, 0.0, "hop_gradient");
    if (i == seed) r.params["seed"] = 1;
    cfg.robots.push_back(r);
  }
  World world(cfg, ProgramRegistry::with_builtins());
  for (int i = 0; i < ticks; ++i) world.step();
  std::vector<int> hops;
  for (const Robot& r : world.robots()) {
    const auto* p = dynamic_cast<const HopGradientProgram*>(r.slot.program.get());
    hops.push_back(p == nullptr ? -2 : p->hop());
  }
  return hops;
}

std::vector<int> as_hops(const std::vector<int>& bfs) {
  std::vector<int> out;
  for (int d : bfs) out.push_back(d < 0 ? kHopUnreached : d);
  return out;
}

WorldConfig phototaxis_world(Pose2D start, Vec2 light) {
  WorldConfig cfg = fixtures::empty_world(3.0, 3.0);
  cfg.sensing.noise_light = 0.0;
  cfg.sensing.noise_accel = 0.0;
  cfg.sensing.noise_gyro = 0.0;
  cfg.lights.push_back({light, 0.01, LightKind::point});
  RobotSpec r = fixtures::robot_at(start.x, start.y, start.theta, "phototaxis");
  r.motion = fixtures::noiseless(LocomotionModel::vibration);
  cfg.robots.push_back(r);
  return cfg;
}

}  // namespace

TEST(HopGradient, LineOfFive) {
  const std::vector<Vec2> pts = {{-0.4, 0}, {-0.2, 0}, {0, 0}, {0.2, 0}, {0.4, 0}};
  const auto expected = as_hops(bfs_hops(pts, 0.25, 0));
  EXPECT_EQ(expected, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(run_hops(pts, 0, 1000), expected);
}

TEST(HopGradient, Triangle) {
  const std::vector<Vec2> pts = {{0, 0}, {0.15, 0}, {0.075, 0.13}};
  const auto expected = as_hops(bfs_hops(pts, 0.25, 0));
  EXPECT_EQ(expected, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(run_hops(pts, 0, 500), expected);
}

TEST(HopGradient, IsolatedRobotStaysUnreached) {
  const std::vector<Vec2> pts = {{-0.5, 0}, {-0.3, 0}, {0.6, 0.6}};
  EXPECT_EQ(run_hops(pts, 0, 1000), (std::vector<int>{0, 1, kHopUnreached}));
}

TEST(HopGradient, StateRoundTrip) {
  HopGradientProgram a;
  RobotIo io;
  io.params["seed"] = 1;
  Api api(io);
  a.setup(api);
  HopGradientProgram b;
  b.load_state(a.save_state());
  EXPECT_EQ(b.hop(), 0);
  EXPECT_THROW(b.load_state(std::vector<std::uint8_t>{1}), std::invalid_argument);
}

TEST(Phototaxis, StaysNearSourceWhenArrived) {
  World world(phototaxis_world({0.05, 0.0, 3.0}, {0.0, 0.0}), ProgramRegistry::with_builtins());
  for (int i = 0; i < 30000; ++i) {
    world.step();
    ASSERT_LT(norm(world.robot_pose(world.robots()[0]).position()), 0.15);
  }
}

TEST(Phototaxis, SourceAheadGivesStraightApproach) {
  World world(phototaxis_world({-0.5, 0.0, 0.0}, {0.5, 0.0}), ProgramRegistry::with_builtins());
  double max_dev = 0.0;
  for (int i = 0; i < 60000; ++i) {
    world.step();
    max_dev = std::max(max_dev, std::abs(world.robot_pose(world.robots()[0]).theta));
  }
  const Pose2D end = world.robot_pose(world.robots()[0]);
  EXPECT_LT(std::abs(end.theta), 0.2);
  EXPECT_LT(max_dev, 0.2);
  EXPECT_LT(norm(end.position() - Vec2{0.5, 0.0}), 0.1);
}

TEST(Phototaxis, BackSourceTriggersSpin) {
  PhototaxisProgram p;
  RobotIo io;
  io.photo = {100, 100, 5000};
  Api api(io);
  p.step(api);
  EXPECT_NE(io.motors.left, io.motors.right);
  io.photo = {65535, 60000, 10};
  p.step(api);
  EXPECT_EQ(io.motors, MotorCommand{});
}

TEST(RunTumble, RunDurationsAndHeadings) {
  // Controller-level loop with an ideal gyro: the heading advances by the
  // commanded vibration turn rate over each controller period.
  const ProgramRegistry reg = ProgramRegistry::with_builtins();
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "run_tumble", reg));
  RobotIo io;
  io.rng = RngStream(2024, 0, StreamId::controller);
  const MotionModelParams motion = fixtures::noiseless(LocomotionModel::vibration);
  const double period = io.period_s;

  double heading = 0.0;
  double before_tumble = 0.0;
  bool running = false;
  int run_ticks = 0;
  std::vector<double> runs;
  std::vector<double> headings;
  std::vector<double> turns;
  while (runs.size() < 10000) {
    tick_controller(slot, io, reg);
    ASSERT_TRUE(io.outbox.empty());
    const bool forward = io.motors.left == 1.0 && io.motors.right == 1.0;
    if (forward) {
      if (!running) {
        if (!runs.empty() || run_ticks > 0) {
          headings.push_back(wrap_angle(heading));
          turns.push_back(wrap_angle(heading - before_tumble));
        }
        running = true;
        run_ticks = 0;
      }
      ++run_ticks;
    } else if (running) {
      runs.push_back(run_ticks * period);
      running = false;
      before_tumble = heading;
    }
    const double omega = nominal_twist(io.motors, motion).omega;
    heading += omega * period;
    io.imu.gyro_z = omega;
  }

  double mean = 0.0;
  for (double r : runs) mean += r;
  mean /= static_cast<double>(runs.size());
  EXPECT_NEAR(mean, RunTumbleProgram::kMeanRunSeconds, 0.05 * RunTumbleProgram::kMeanRunSeconds);

  auto chi_square = [](const std::vector<double>& angles) {
    std::vector<double> bins(16, 0.0);
    for (double a : angles) {
      auto b = static_cast<std::size_t>((a + std::numbers::pi) / (2.0 * std::numbers::pi) * 16.0);
      bins[std::min<std::size_t>(b, 15)] += 1.0;
    }
    const double expected = static_cast<double>(angles.size()) / 16.0;
    double chi = 0.0;
    for (double o : bins) chi += (o - expected) * (o - expected) / expected;
    return chi;
  };
  // 99th percentile of chi-square with 15 degrees of freedom.
  const double critical = 30.578;
  ASSERT_GT(headings.size(), 9000u);
  EXPECT_LT(chi_square(headings), critical);
  EXPECT_LT(chi_square(turns), critical);
}

TEST(RunTumble, NeverTransmitsInWorld) {
  WorldConfig cfg = fixtures::empty_world(2.0, 2.0);
  for (int i = 0; i < 10; ++i) cfg.robots.push_back(fixtures::robot_at(-0.8 + 0.17 * i, 0.0, 0.0, "run_tumble"));
  MemorySink sink;
  World world(cfg, ProgramRegistry::with_builtins(), &sink);
  for (int i = 0; i < 20000; ++i) world.step();
  EXPECT_TRUE(fixtures::records_of(sink.records, RecordKind::frame_tx).empty());
  EXPECT_GT(fixtures::records_of(sink.records, RecordKind::led).size(), 10u);
}

TEST(DemoSignals, StopAndStart) {
  const ProgramRegistry reg = ProgramRegistry::with_builtins();
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "hop_gradient", reg));
  RobotIo io;
  io.signals.push_back({kSignalStop, {}, SignalOrigin::script});
  tick_controller(slot, io, reg);
  EXPECT_TRUE(io.outbox.empty());
  io.signals.push_back({kSignalStart, {}, SignalOrigin::script});
  tick_controller(slot, io, reg);
  EXPECT_EQ(io.outbox.size(), 1u);
}
