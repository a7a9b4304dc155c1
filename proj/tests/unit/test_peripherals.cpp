#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "pogosim/peripherals.hpp"
#include "pogosim/world.hpp"
#include "test_programs.hpp"

using namespace pogosim;

namespace {

ShowerDevice shower_at_origin() {
  ShowerDevice s;
  s.id = 100;
  s.pose = {0.0, 0.0, 0.0};
  return s;
}

BodyDisc robot_disc(EntityId id, double x, double y) { return {id, BodyKind::robot, kRobotRadius, {x, y, 0.0}}; }

std::vector<EntityId> targets(const ShowerDevice& s, const std::vector<BodyDisc>& bodies) {
  return shower_cone_targets(s, bodies, Occluders{bodies, {}});
}

Pogobject movable_object(std::uint32_t threshold) {
  Pogobject o;
  o.disc = {50, BodyKind::pogobject, 0.05, {0.0, 0.0, 0.0}, false};
  o.movable = true;
  o.push_threshold = threshold;
  return o;
}

Pusher pusher_behind(double lateral, double speed) {
  const double r = 0.05 + kRobotRadius;
  const double back = std::sqrt(r * r - lateral * lateral);
  return {{-back, lateral, 0.0}, kRobotRadius, {speed, 0.0}};
}

// Collects the wall ids carried by wall beacon payloads.
class BeaconLogger final : public Program {
 public:
  explicit BeaconLogger(std::shared_ptr<std::vector<std::pair<std::uint16_t, FaceId>>> log) : log_(std::move(log)) {}
  void step(Api& api) override {
    while (auto m = api.receive_any()) {
      if (m->type != MsgType::wall_beacon || m->payload.size() != 3) continue;
      if (m->payload[0] != static_cast<std::uint8_t>(BeaconSource::wall)) continue;
      log_->push_back({static_cast<std::uint16_t>(m->payload[1] | (m->payload[2] << 8)), m->face});
    }
  }

 private:
  std::shared_ptr<std::vector<std::pair<std::uint16_t, FaceId>>> log_;
};

}  // namespace

TEST(Shower, AxialRobotAtHalfRangeIncluded) {
  const ShowerDevice s = shower_at_origin();
  EXPECT_EQ(targets(s, {robot_disc(0, s.range / 2, 0.0)}), (std::vector<EntityId>{0}));
}

TEST(Shower, RangeBoundary) {
  const ShowerDevice s = shower_at_origin();
  EXPECT_EQ(targets(s, {robot_disc(0, 0.5, 0.0)}).size(), 1u);
  EXPECT_TRUE(targets(s, {robot_disc(0, 0.5 + 1e-9, 0.0)}).empty());
}

TEST(Shower, ConeBoundary) {
  const ShowerDevice s = shower_at_origin();
  const Vec2 in = unit_from_angle(deg_to_rad(29.9)) * 0.3;
  const Vec2 out = unit_from_angle(deg_to_rad(-30.1)) * 0.3;
  EXPECT_EQ(targets(s, {robot_disc(3, in.x, in.y), robot_disc(4, out.x, out.y)}), (std::vector<EntityId>{3}));
}

TEST(Shower, OcclusionByRobotOnAxis) {
  const ShowerDevice s = shower_at_origin();
  EXPECT_EQ(targets(s, {robot_disc(1, 0.3, 0.0), robot_disc(0, 0.2, 0.0)}), (std::vector<EntityId>{0}));
}

TEST(Shower, OcclusionMatchesSegmentDiscOracle) {
  ShowerDevice s = shower_at_origin();
  s.cone_half_angle = 90.0;
  RngStream rng(6, 0, StreamId::init);
  for (int k = 0; k < 300; ++k) {
    std::vector<BodyDisc> bodies;
    for (EntityId i = 0; i < 6; ++i) bodies.push_back(robot_disc(i, rng.uniform(0.05, 0.45), rng.uniform(-0.3, 0.3)));
    std::vector<EntityId> expected;
    for (const BodyDisc& target : bodies) {
      const Vec2 t = target.pose.position();
      if (norm(t) > s.range || t.x < 0.0) continue;
      bool blocked = false;
      for (const BodyDisc& other : bodies) {
        if (other.id == target.id) continue;
        // Distance from the disc center to the segment origin -> target.
        const Vec2 c = other.pose.position();
        const double u = std::clamp(dot(c, t) / dot(t, t), 0.0, 1.0);
        const Vec2 closest = t * u;
        if (norm(c - closest) < other.radius) blocked = true;
      }
      if (!blocked) expected.push_back(target.id);
    }
    ASSERT_EQ(targets(s, bodies), expected) << "k=" << k;
  }
}

TEST(Shower, IgnoresNonRobotBodies) {
  const ShowerDevice s = shower_at_origin();
  std::vector<BodyDisc> bodies = {{7, BodyKind::pogobject, 0.05, {0.2, 0.0, 0.0}, false}};
  EXPECT_TRUE(targets(s, bodies).empty());
}

TEST(Wall, EmissionIsOneSided) {
  WallSegment w;
  w.segment = {{0.2, -0.2}, {0.2, 0.2}};
  EXPECT_EQ(w.outward_normal(), (Vec2{-1.0, 0.0}));
  const auto front = wall_emission_point(w, {0.15, 0.05});
  ASSERT_TRUE(front.has_value());
  EXPECT_NEAR(front->x, 0.2, 1e-15);
  EXPECT_NEAR(front->y, 0.05, 1e-15);
  EXPECT_FALSE(wall_emission_point(w, {0.25, 0.0}).has_value());
  EXPECT_FALSE(wall_emission_point(w, {-0.05, 0.0}).has_value());
}

TEST(Wall, BeaconCadence) {
  for (std::uint64_t t = 0; t < 1000; ++t) EXPECT_EQ(beacon_due(t, 100, 37), t % 100 == 37);
  EXPECT_FALSE(beacon_due(0, 0, 0));
}

TEST(Wall, TwoWallsDistinguishableWithFacingFace) {
  auto log = std::make_shared<std::vector<std::pair<std::uint16_t, FaceId>>>();
  ProgramRegistry reg = ProgramRegistry::with_builtins();
  reg.add("logger", [log] { return std::make_unique<BeaconLogger>(log); });
  WorldConfig cfg = fixtures::empty_world(1.0, 1.0);
  cfg.robots.push_back(fixtures::robot_at(0.15, 0.0, 0.0, "logger"));
  cfg.robots.push_back(fixtures::robot_at(0.3, -0.15, 0.0, "logger"));
  cfg.walls.push_back({{{0.2, -0.2}, {0.2, 0.2}}, 1, 0.1, 0.2});
  cfg.walls.push_back({{{0.2, 0.1}, {-0.2, 0.1}}, 2, 0.1, 0.2});
  MemorySink sink;
  World world(cfg, reg, &sink);
  for (int i = 0; i < 1000; ++i) world.step();

  std::set<std::uint16_t> ids;
  for (const auto& [id, face] : *log) {
    ids.insert(id);
    if (id == 1) EXPECT_EQ(face, FaceId::front);
    if (id == 2) EXPECT_EQ(face, FaceId::left);
  }
  EXPECT_EQ(ids, (std::set<std::uint16_t>{1, 2}));

  // The robot outside wall 1 never hears it; wall 2 is beyond its range.
  std::map<EntityId, std::vector<std::uint64_t>> tx_ticks;
  for (const TraceRecord& r : sink.records) {
    if (r.kind == RecordKind::frame_rx) EXPECT_NE(r.id, 1u);
    if (r.kind == RecordKind::frame_tx) tx_ticks[r.id].push_back(r.tick);
  }
  ASSERT_EQ(tx_ticks.size(), 2u);
  for (const auto& [id, ticks] : tx_ticks) {
    ASSERT_EQ(ticks.size(), 10u);
    for (std::size_t i = 1; i < ticks.size(); ++i) EXPECT_EQ(ticks[i] - ticks[i - 1], 100u);
  }
}

TEST(Push, SinglePusherBelowThreshold) {
  const Pogobject o = movable_object(2);
  const std::vector<Pusher> p = {pusher_behind(0.0, 0.06)};
  EXPECT_EQ(object_push_update(o, p, 1e-3), o.disc.pose);
}

TEST(Push, TwoAlignedPushersMoveAlongHeading) {
  const Pogobject o = movable_object(2);
  const std::vector<Pusher> p = {pusher_behind(0.03, 0.06), pusher_behind(-0.03, 0.06)};
  const Pose2D next = object_push_update(o, p, 1e-3);
  const Vec2 d = next.position() - o.disc.pose.position();
  EXPECT_GT(norm(d), 0.0);
  EXPECT_LT(std::abs(std::atan2(d.y, d.x)), deg_to_rad(5.0));
  EXPECT_NEAR(norm(d), 0.06 * 1e-3, 1e-15);
}

TEST(Push, SpeedCappedByObjectLimit) {
  Pogobject o = movable_object(2);
  o.v_max = 0.01;
  const std::vector<Pusher> p = {pusher_behind(0.03, 0.06), pusher_behind(-0.03, 0.06)};
  EXPECT_NEAR(norm(object_push_update(o, p, 1.0).position()), 0.01, 1e-12);
}

TEST(Push, ImmovableNeverMoves) {
  Pogobject o = movable_object(1);
  o.movable = false;
  const std::vector<Pusher> p = {pusher_behind(0.03, 0.06), pusher_behind(-0.03, 0.06), pusher_behind(0.0, 0.06)};
  EXPECT_EQ(object_push_update(o, p, 1.0), o.disc.pose);
}

TEST(Push, RetreatingOrDistantRobotsDoNotCount) {
  const Pogobject o = movable_object(2);
  Pusher away = pusher_behind(0.0, 0.06);
  away.pose.theta = 3.14159;
  Pusher far = pusher_behind(0.03, 0.06);
  far.pose.x -= 0.01;
  const std::vector<Pusher> p = {pusher_behind(-0.03, 0.06), away, far};
  EXPECT_EQ(object_push_update(o, p, 1e-3), o.disc.pose);
}
