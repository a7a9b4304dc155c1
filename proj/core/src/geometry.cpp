#include "pogosim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pogosim {

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

double signed_area(std::span<const Vec2> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * acc;
}

}  // namespace

bool segments_intersect(const Segment& s1, const Segment& s2) {
  const double d1 = orient(s2.a, s2.b, s1.a);
  const double d2 = orient(s2.a, s2.b, s1.b);
  const double d3 = orient(s1.a, s1.b, s2.a);
  const double d4 = orient(s1.a, s1.b, s2.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(s2.a, s2.b, s1.a)) return true;
  if (d2 == 0 && on_segment(s2.a, s2.b, s1.b)) return true;
  if (d3 == 0 && on_segment(s1.a, s1.b, s2.a)) return true;
  if (d4 == 0 && on_segment(s1.a, s1.b, s2.b)) return true;
  return false;
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const double a = signed_area(vertices_);
  if (a == 0.0) throw std::invalid_argument("polygon has zero area");
  if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

Polygon Polygon::rectangle(double width, double height) {
  const double hw = width / 2.0;
  const double hh = height / 2.0;
  return Polygon({{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}});
}

Vec2 Polygon::inward_normal(std::size_t i) const {
  const Segment e = edge(i);
  const Vec2 d = e.b - e.a;
  const double len = norm(d);
  // Counterclockwise winding: the interior is on the left of each edge.
  return {-d.y / len, d.x / len};
}

bool Polygon::contains(Vec2 p) const {
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double Polygon::boundary_distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edge_count(); ++i) best = std::min(best, distance_point_segment(edge(i), p));
  return best;
}

double Polygon::area() const { return signed_area(vertices_); }

Vec2 Polygon::centroid() const {
  double cx = 0.0;
  double cy = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[(i + 1) % n];
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  const double a6 = 6.0 * area();
  return {cx / a6, cy / a6};
}

}  // namespace pogosim
