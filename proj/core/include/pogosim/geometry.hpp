#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace pogosim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
constexpr double norm_sq(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Planar pose. Heading is counterclockwise from +x and kept in [-pi, pi).
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2D&) const = default;
};

inline Pose2D make_pose(double x, double y, double theta) { return {x, y, wrap_angle(theta)}; }

/// Expresses a world-frame vector in the body frame of `pose`.
inline Vec2 to_body_frame(const Pose2D& pose, Vec2 world_vec) { return rotate(world_vec, -pose.theta); }

/// Bearing (radians) of `target` as seen from `pose`, in its body frame.
inline double body_bearing(const Pose2D& pose, Vec2 target) {
  const Vec2 d = target - pose.position();
  return wrap_angle(std::atan2(d.y, d.x) - pose.theta);
}

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Closest point on segment `s` to `p`.
inline Vec2 closest_point_on_segment(const Segment& s, Vec2 p) {
  const Vec2 ab = s.b - s.a;
  const double len_sq = norm_sq(ab);
  if (len_sq == 0.0) return s.a;
  double t = dot(p - s.a, ab) / len_sq;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return s.a + ab * t;
}

inline double distance_point_segment(const Segment& s, Vec2 p) { return norm(p - closest_point_on_segment(s, p)); }

/// True if the open disc (center, radius) intersects segment `s`.
inline bool segment_intersects_disc(const Segment& s, Vec2 center, double radius) {
  return norm_sq(center - closest_point_on_segment(s, center)) < radius * radius;
}

/// Proper or touching intersection of two segments.
bool segments_intersect(const Segment& s1, const Segment& s2);

/// Simple polygon (convex or not). Vertices are stored counterclockwise.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);

  static Polygon rectangle(double width, double height);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t edge_count() const { return vertices_.size(); }
  Segment edge(std::size_t i) const { return {vertices_[i], vertices_[(i + 1) % vertices_.size()]}; }
  /// Unit normal of edge i pointing into the polygon.
  Vec2 inward_normal(std::size_t i) const;

  bool contains(Vec2 p) const;
  /// Distance from `p` to the polygon boundary.
  double boundary_distance(Vec2 p) const;
  Vec2 centroid() const;
  double area() const;

 private:
  std::vector<Vec2> vertices_;
};

}  // namespace pogosim
