#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pogosim/geometry.hpp"

using namespace pogosim;

TEST(WrapAngle, StaysInHalfOpenRange) {
  for (double a = -20.0; a <= 20.0; a += 0.137) {
    const double w = wrap_angle(a);
    EXPECT_GE(w, -std::numbers::pi);
    EXPECT_LT(w, std::numbers::pi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
  }
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), -std::numbers::pi);
}

TEST(BodyBearing, MatchesRotatedFrame) {
  const Pose2D p{1.0, 2.0, std::numbers::pi / 2};
  EXPECT_NEAR(body_bearing(p, {1.0, 3.0}), 0.0, 1e-12);
  EXPECT_NEAR(body_bearing(p, {0.0, 2.0}), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(body_bearing(p, {2.0, 2.0}), -std::numbers::pi / 2, 1e-12);
}

TEST(Segment, ClosestPointClampsToEndpoints) {
  const Segment s{{0, 0}, {1, 0}};
  EXPECT_EQ(closest_point_on_segment(s, {0.5, 2.0}), (Vec2{0.5, 0.0}));
  EXPECT_EQ(closest_point_on_segment(s, {-3.0, 1.0}), (Vec2{0.0, 0.0}));
  EXPECT_EQ(closest_point_on_segment(s, {4.0, -1.0}), (Vec2{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(distance_point_segment(s, {2.0, 0.0}), 1.0);
}

TEST(Segment, IntersectionCases) {
  EXPECT_TRUE(segments_intersect({{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}));
  EXPECT_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));
  EXPECT_TRUE(segments_intersect({{0, 0}, {1, 0}}, {{1, 0}, {2, 5}}));
  EXPECT_TRUE(segments_intersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}));
  EXPECT_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}));
}

TEST(Segment, DiscIntersectionIsOpen) {
  const Segment s{{0, 0}, {1, 0}};
  EXPECT_TRUE(segment_intersects_disc(s, {0.5, 0.02}, 0.03));
  EXPECT_FALSE(segment_intersects_disc(s, {0.5, 0.03}, 0.03));
  EXPECT_FALSE(segment_intersects_disc(s, {1.05, 0.0}, 0.03));
}

TEST(Polygon, CenteredRectangle) {
  const Polygon r = Polygon::rectangle(2.0, 1.0);
  EXPECT_TRUE(r.contains({0.0, 0.0}));
  EXPECT_TRUE(r.contains({0.9, 0.4}));
  EXPECT_FALSE(r.contains({1.1, 0.0}));
  EXPECT_NEAR(r.area(), 2.0, 1e-12);
  EXPECT_NEAR(r.boundary_distance({0.0, 0.0}), 0.5, 1e-12);
  EXPECT_NEAR(r.boundary_distance({0.9, 0.0}), 0.1, 1e-12);
  const Vec2 c = r.centroid();
  EXPECT_NEAR(c.x, 0.0, 1e-12);
  EXPECT_NEAR(c.y, 0.0, 1e-12);
}

TEST(Polygon, ClockwiseInputIsReoriented) {
  const Polygon p({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(p.area(), 0.0);
  for (std::size_t i = 0; i < p.edge_count(); ++i) {
    const Segment e = p.edge(i);
    const Vec2 mid = (e.a + e.b) * 0.5;
    EXPECT_TRUE(p.contains(mid + p.inward_normal(i) * 1e-3));
  }
}

TEST(Polygon, ConcaveLShape) {
  const Polygon l({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  EXPECT_TRUE(l.contains({0.5, 1.5}));
  EXPECT_TRUE(l.contains({1.5, 0.5}));
  EXPECT_FALSE(l.contains({1.5, 1.5}));
  EXPECT_NEAR(l.area(), 3.0, 1e-12);
}
