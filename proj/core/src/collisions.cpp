#include "pogosim/collisions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <vector>

namespace pogosim {

namespace {

class SpatialHash {
 public:
  explicit SpatialHash(double cell) : inv_cell_(1.0 / cell) {}

  void insert(std::size_t index, Vec2 p) { cells_[key(cell_of(p.x), cell_of(p.y))].push_back(index); }

  template <typename F>
  void for_each_near(Vec2 p, F&& fn) const {
    const std::int64_t cx = cell_of(p.x);
    const std::int64_t cy = cell_of(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) fn(j);
      }
    }
  }

 private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v * inv_cell_)); }
  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xFFFFFFFFULL);
  }

  double inv_cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

void push_out_of_walls(BodyDisc& b, std::span<const Segment> walls) {
  for (const Segment& w : walls) {
    const Vec2 p = b.pose.position();
    const Vec2 q = closest_point_on_segment(w, p);
    const Vec2 d = p - q;
    const double dist = norm(d);
    if (dist >= b.radius) continue;
    Vec2 n;
    if (dist > 0.0) {
      n = d * (1.0 / dist);
    } else {
      const Vec2 e = w.b - w.a;
      const double len = norm(e);
      n = {-e.y / len, e.x / len};
    }
    const Vec2 moved = p + n * (b.radius - dist);
    b.pose.x = moved.x;
    b.pose.y = moved.y;
  }
}

void clamp_into_arena(BodyDisc& b, const Polygon& arena) {
  Vec2 p = b.pose.position();
  // Nearest boundary point decides both the outside case and the on-boundary case.
  std::size_t best_edge = 0;
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_q;
  for (std::size_t i = 0; i < arena.edge_count(); ++i) {
    const Vec2 q = closest_point_on_segment(arena.edge(i), p);
    const double d = norm(p - q);
    if (d < best) {
      best = d;
      best_q = q;
      best_edge = i;
    }
  }
  if (best < 1e-12 || !arena.contains(p)) {
    p = best_q + arena.inward_normal(best_edge) * b.radius;
  }
  for (std::size_t i = 0; i < arena.edge_count(); ++i) {
    const Vec2 q = closest_point_on_segment(arena.edge(i), p);
    const Vec2 d = p - q;
    const double dist = norm(d);
    if (dist >= b.radius) continue;
    const Vec2 n = dist > 0.0 ? d * (1.0 / dist) : arena.inward_normal(i);
    p = p + n * (b.radius - dist);
  }
  b.pose.x = p.x;
  b.pose.y = p.y;
}

}  // namespace

void constrain_disc(BodyDisc& body, const Polygon* arena, std::span<const Segment> walls) {
  push_out_of_walls(body, walls);
  if (arena != nullptr) clamp_into_arena(body, *arena);
}

CollisionReport resolve_collisions(std::span<BodyDisc> bodies, const Polygon* arena, std::span<const Segment> walls,
                                   const CollisionSettings& settings) {
  CollisionReport report;
  if (bodies.empty()) return report;
  double max_radius = 0.0;
  for (const BodyDisc& b : bodies) max_radius = std::max(max_radius, b.radius);

  std::vector<std::size_t> near;
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    ++report.iterations;
    SpatialHash grid(2.0 * max_radius);
    for (std::size_t i = 0; i < bodies.size(); ++i) grid.insert(i, bodies[i].pose.position());

    double max_pen = 0.0;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      near.clear();
      grid.for_each_near(bodies[i].pose.position(), [&](std::size_t j) {
        if (j > i) near.push_back(j);
      });
      std::sort(near.begin(), near.end());
      for (std::size_t j : near) {
        BodyDisc& a = bodies[i];
        BodyDisc& b = bodies[j];
        const double wa = a.movable ? 1.0 : 0.0;
        const double wb = b.movable ? 1.0 : 0.0;
        if (wa + wb == 0.0) continue;
        Vec2 d = b.pose.position() - a.pose.position();
        double dist = norm(d);
        const double pen = a.radius + b.radius - dist;
        if (pen <= 0.0) continue;
        max_pen = std::max(max_pen, pen);
        Vec2 n;
        if (dist > 0.0) {
          n = d * (1.0 / dist);
        } else {
          // Coincident centers: separate along a direction fixed by the ids.
          n = unit_from_angle(static_cast<double>((a.id * 7919u + b.id) % 360u) * std::numbers::pi / 180.0);
        }
        const double share_a = wa / (wa + wb);
        const double share_b = wb / (wa + wb);
        a.pose.x -= n.x * pen * share_a;
        a.pose.y -= n.y * pen * share_a;
        b.pose.x += n.x * pen * share_b;
        b.pose.y += n.y * pen * share_b;
      }
    }
    for (BodyDisc& b : bodies) {
      if (b.movable) constrain_disc(b, arena, walls);
    }
    report.max_penetration = max_pen;
    if (max_pen <= settings.tolerance) break;
  }
  return report;
}

double max_pair_penetration(std::span<const BodyDisc> bodies, BodyKind kind) {
  double worst = 0.0;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (bodies[i].kind != kind) continue;
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      if (bodies[j].kind != kind) continue;
      const double pen = bodies[i].radius + bodies[j].radius - norm(bodies[j].pose.position() - bodies[i].pose.position());
      worst = std::max(worst, pen);
    }
  }
  return worst;
}

}  // namespace pogosim
