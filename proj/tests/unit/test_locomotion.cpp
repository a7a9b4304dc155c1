#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pogosim/locomotion.hpp"

using namespace pogosim;

namespace {

MotionModelParams diff_params() {
  MotionModelParams p;
  p.model = LocomotionModel::differential;
  return p;
}

MotionModelParams quiet_vibration() {
  MotionModelParams p;
  p.noise_v = 0.0;
  p.noise_omega = 0.0;
  p.bias_std = 0.0;
  return p;
}

Pose2D run_diff(Pose2D pose, MotorCommand cmd, int steps, double dt = 1e-3) {
  const MotionModelParams p = diff_params();
  for (int i = 0; i < steps; ++i) pose = diff_drive_step(pose, cmd, p, dt);
  return pose;
}

}  // namespace

TEST(DiffDrive, StraightLine) {
  const Pose2D start{0.1, -0.2, 0.3};
  const Pose2D end = run_diff(start, {1.0, 1.0}, 10000);
  EXPECT_NEAR(end.x, 0.1 + 0.6 * std::cos(0.3), 1e-9);
  EXPECT_NEAR(end.y, -0.2 + 0.6 * std::sin(0.3), 1e-9);
  EXPECT_DOUBLE_EQ(end.theta, 0.3);
}

TEST(DiffDrive, RotationInPlace) {
  const Pose2D start{0.5, 0.5, 0.0};
  const Pose2D end = run_diff(start, {-1.0, 1.0}, 1000);
  EXPECT_DOUBLE_EQ(end.x, 0.5);
  EXPECT_DOUBLE_EQ(end.y, 0.5);
  // omega = 2 v_max / wheel_base = 2.4 rad/s
  EXPECT_NEAR(end.theta, wrap_angle(2.4), 1e-9);
}

TEST(DiffDrive, ArcHasClosedFormRadius) {
  // left=1, right=0.5: v = 0.045, omega = -0.6, R = v / omega = -0.075
  const MotionModelParams p = diff_params();
  const double v = 0.045;
  const double omega = -0.6;
  const double r = v / omega;
  EXPECT_NEAR(r, -0.075, 1e-15);
  Pose2D pose{0.0, 0.0, 0.0};
  const Vec2 center{0.0, r};
  for (int i = 1; i <= 20000; ++i) {
    pose = diff_drive_step(pose, {1.0, 0.5}, p, 1e-3);
    ASSERT_NEAR(norm(pose.position() - center), std::abs(r), 1e-9);
  }
  const double t = 20.0;
  EXPECT_NEAR(pose.x, r * (std::sin(omega * t)), 1e-9);
  EXPECT_NEAR(pose.y, -r * (std::cos(omega * t) - 1.0), 1e-9);
}

TEST(DiffDrive, DutiesAreClamped) {
  const Pose2D a = run_diff({}, {3.0, 3.0}, 100);
  const Pose2D b = run_diff({}, {1.0, 1.0}, 100);
  EXPECT_EQ(a, b);
}

TEST(Vibration, ZeroDutyIsFixedPointUnderNoise) {
  MotionModelParams p;
  p.noise_v = 0.5;
  p.noise_omega = 1.0;
  p.bias_omega = 0.3;
  RngStream rng(1, 0, StreamId::motion_noise);
  const Pose2D start{0.2, 0.3, 1.0};
  Pose2D pose = start;
  for (int i = 0; i < 1000; ++i) {
    pose = vibration_step(pose, {0.0, 0.0, 1.0}, p, draw_vibration_noise(p, rng), 1e-3);
  }
  EXPECT_EQ(pose, start);
}

TEST(Vibration, NoiselessStraightEqualsDifferential) {
  const MotionModelParams vib = quiet_vibration();
  const MotionModelParams diff = diff_params();
  Pose2D a{0.0, 0.0, 0.7};
  Pose2D b = a;
  for (int i = 0; i < 5000; ++i) {
    a = vibration_step(a, {1.0, 1.0}, vib, {}, 1e-3);
    b = diff_drive_step(b, {1.0, 1.0}, diff, 1e-3);
  }
  EXPECT_EQ(a, b);
}

TEST(Vibration, TurnsTowardsSlowerSide) {
  const MotionModelParams p = quiet_vibration();
  const Pose2D end = vibration_step({}, {1.0, 0.0}, p, {}, 0.1);
  EXPECT_GT(end.theta, 0.0);
  EXPECT_NEAR(end.theta, std::numbers::pi * 0.1, 1e-12);
}

TEST(Vibration, SpeedBoundWithClippedNoise) {
  MotionModelParams p;
  p.noise_v = 0.3;
  p.noise_omega = 0.5;
  RngStream rng(99, 3, StreamId::motion_noise);
  Pose2D pose{};
  const double dt = 1e-3;
  const double bound = p.v_max * (1.0 + 5.0 * p.noise_v) * dt;
  for (int i = 0; i < 20000; ++i) {
    const Pose2D next = vibration_step(pose, {1.0, 0.8}, p, draw_vibration_noise(p, rng), dt);
    ASSERT_LE(norm(next.position() - pose.position()), bound + 1e-15);
    pose = next;
  }
}

TEST(Vibration, RotationalEquivariance) {
  MotionModelParams p;
  const double phi = 1.1;
  RngStream rng_a(4, 2, StreamId::motion_noise);
  RngStream rng_b(4, 2, StreamId::motion_noise);
  Pose2D a{0.0, 0.0, 0.2};
  Pose2D b{0.0, 0.0, 0.2 + phi};
  for (int i = 0; i < 3000; ++i) {
    const MotorCommand cmd{0.9, 0.6};
    a = vibration_step(a, cmd, p, draw_vibration_noise(p, rng_a), 1e-3);
    b = vibration_step(b, cmd, p, draw_vibration_noise(p, rng_b), 1e-3);
  }
  const Vec2 rotated = rotate(a.position(), phi);
  EXPECT_NEAR(b.x, rotated.x, 1e-9);
  EXPECT_NEAR(b.y, rotated.y, 1e-9);
  EXPECT_NEAR(wrap_angle(b.theta - a.theta - phi), 0.0, 1e-9);
}

TEST(Vibration, NegativeDutiesClampToZero) {
  const MotorCommand c = clamp_command({-1.0, 0.5, 2.0}, LocomotionModel::vibration);
  EXPECT_EQ(c, (MotorCommand{0.0, 0.5, 1.0}));
}

TEST(Unicycle, MatchesClosedFormOverOneStep) {
  const Pose2D p{1.0, 1.0, 0.5};
  const double v = 0.05;
  const double w = 0.8;
  const double t = 2.0;
  const Pose2D q = integrate_unicycle(p, v, w, t);
  EXPECT_NEAR(q.x, 1.0 + v / w * (std::sin(0.5 + w * t) - std::sin(0.5)), 1e-14);
  EXPECT_NEAR(q.y, 1.0 - v / w * (std::cos(0.5 + w * t) - std::cos(0.5)), 1e-14);
}

TEST(MotionParams, RejectsNonPositiveLimits) {
  MotionModelParams p;
  p.v_max = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(locomotion_model_from_string("hover"), std::invalid_argument);
}
