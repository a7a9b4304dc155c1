#include "pogosim/peripherals.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pogosim {

Vec2 WallSegment::outward_normal() const {
  const Vec2 d = segment.b - segment.a;
  const double len = norm(d);
  return {-d.y / len, d.x / len};
}

std::vector<EntityId> shower_cone_targets(const ShowerDevice& shower, std::span<const BodyDisc> robots,
                                          const Occluders& occluders) {
  std::vector<EntityId> out;
  const double half = deg_to_rad(shower.cone_half_angle);
  for (const BodyDisc& r : robots) {
    if (r.kind != BodyKind::robot) continue;
    const Vec2 d = r.pose.position() - shower.pose.position();
    if (norm(d) > shower.range) continue;
    if (!within_cone(body_bearing(shower.pose, r.pose.position()), 0.0, half)) continue;
    const std::array<EntityId, 2> ends = {shower.id, r.id};
    if (!line_of_sight(shower.pose.position(), r.pose.position(), occluders, ends)) continue;
    out.push_back(r.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Vec2> wall_emission_point(const WallSegment& wall, Vec2 p) {
  const Vec2 q = closest_point_on_segment(wall.segment, p);
  if (norm(p - q) > wall.emit_range) return std::nullopt;
  if (dot(p - wall.segment.a, wall.outward_normal()) <= 0.0) return std::nullopt;
  return q;
}

Pose2D object_push_update(const Pogobject& object, std::span<const Pusher> candidates, double dt) {
  if (!object.movable) return object.disc.pose;
  const Vec2 center = object.disc.pose.position();
  Vec2 velocity_sum;
  std::size_t contacts = 0;
  for (const Pusher& p : candidates) {
    const Vec2 to_center = center - p.pose.position();
    const double dist = norm(to_center);
    if (dist > object.disc.radius + p.radius + kContactTolerance || dist == 0.0) continue;
    const Vec2 velocity = unit_from_angle(p.pose.theta) * p.commanded.v;
    if (dot(velocity, to_center) <= 0.0) continue;
    velocity_sum += velocity;
    ++contacts;
  }
  if (contacts < std::max<std::uint32_t>(1, object.push_threshold)) return object.disc.pose;
  const double len = norm(velocity_sum);
  if (len == 0.0) return object.disc.pose;
  const Vec2 dir = velocity_sum * (1.0 / len);
  // Mean commanded speed along the common push direction.
  const double speed = std::min(dot(velocity_sum, dir) / static_cast<double>(contacts), object.v_max);
  if (speed <= 0.0) return object.disc.pose;
  Pose2D out = object.disc.pose;
  out.x += dir.x * speed * dt;
  out.y += dir.y * speed * dt;
  return out;
}

}  // namespace pogosim
