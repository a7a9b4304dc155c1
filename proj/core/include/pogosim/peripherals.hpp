#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pogosim/geometry.hpp"
#include "pogosim/ir.hpp"
#include "pogosim/locomotion.hpp"
#include "pogosim/types.hpp"

namespace pogosim {

/// Handheld cone emitter used for mass programming and operator signals.
struct ShowerDevice {
  EntityId id = 0;
  Pose2D pose;                   // position and aim direction
  double cone_half_angle = 30.0;  // deg
  double range = 0.5;            // m
  int emitter_count = 10;
};

/// Beacon-emitting wall. Emission is towards the left of from -> to.
struct WallSegment {
  EntityId id = 0;  // entity id used as frame sender
  Segment segment;
  std::uint16_t wall_id = 0;
  std::int64_t beacon_period_ticks = 100;
  std::int64_t beacon_phase_ticks = 0;
  double emit_range = 0.2;

  Vec2 outward_normal() const;
};

struct Pogobject {
  BodyDisc disc;  // disc.movable is always false: robots cannot shove objects by collision
  bool movable = false;
  std::uint32_t push_threshold = 2;
  std::uint16_t object_id = 0;
  std::int64_t beacon_period_ticks = 100;
  std::int64_t beacon_phase_ticks = 0;
  double emit_range = 0.25;
  double v_max = 0.06;  // m/s
};

/// Robots whose center is within range and cone of the shower and in line of sight.
/// `robots` are candidate bodies; occluders include robots, objects and walls.
std::vector<EntityId> shower_cone_targets(const ShowerDevice& shower, std::span<const BodyDisc> robots,
                                          const Occluders& occluders);

/// Point on the wall from which a robot at `p` would hear the beacon, or
/// nullopt when `p` is out of range or on the inner side.
std::optional<Vec2> wall_emission_point(const WallSegment& wall, Vec2 p);

/// True if `tick` is a beacon emission tick for the given period and phase.
inline bool beacon_due(std::uint64_t tick, std::int64_t period_ticks, std::int64_t phase_ticks) {
  return period_ticks > 0 && static_cast<std::int64_t>(tick % static_cast<std::uint64_t>(period_ticks)) == phase_ticks;
}

/// A robot pressing against an object.
struct Pusher {
  Pose2D pose;
  double radius = kRobotRadius;
  Twist commanded;  // nominal body-frame twist from the motor command
};

/// Moves a movable object when at least push_threshold robots push it.
/// Returns the new object pose (arena and wall constraints not applied).
Pose2D object_push_update(const Pogobject& object, std::span<const Pusher> candidates, double dt);

/// Contact tolerance for counting a pusher as touching an object, m.
inline constexpr double kContactTolerance = 1e-4;

}  // namespace pogosim
