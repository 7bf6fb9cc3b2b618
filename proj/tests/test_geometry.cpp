#include <beltamp/geometry.hpp>
#include <beltamp/rng.hpp>

#include <gtest/gtest.h>

using namespace beltamp;

TEST(Geometry, WrapAngle) {
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(-std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(0.5 - 4 * std::numbers::pi), 0.5, 1e-12);
}

TEST(Geometry, RectBasics) {
  const Rect r{0, 0, 2, 1};
  EXPECT_DOUBLE_EQ(r.area(), 2.0);
  EXPECT_TRUE(r.contains(Vec2{2, 1}));
  EXPECT_FALSE(r.contains(Vec2{2.1, 1}));
  EXPECT_TRUE(r.contains(Rect{0.5, 0.2, 1.5, 0.8}));
  EXPECT_FALSE(r.overlaps(Rect{2, 0, 3, 1}));  // touching edges
  EXPECT_TRUE(r.overlaps(Rect{1.9, 0.9, 3, 2}));
  EXPECT_EQ(r.clamp({5, -1}), (Vec2{2, 0}));
}

TEST(Geometry, SegmentIntersection) {
  EXPECT_TRUE(segments_intersect({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}}));
  EXPECT_FALSE(segments_intersect({{0, 0}, {1, 1}}, {{2, 2}, {3, 0}}));
  EXPECT_TRUE(segments_intersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}));  // collinear overlap
  EXPECT_TRUE(segments_intersect({{0, 0}, {1, 0}}, {{1, 0}, {1, 1}}));  // shared endpoint
}

TEST(Geometry, SegmentHitsRect) {
  const Rect box{1, 1, 2, 2};
  EXPECT_TRUE(segment_hits_rect({{0, 1.5}, {3, 1.5}}, box));
  EXPECT_FALSE(segment_hits_rect({{0, 0}, {3, 0.5}}, box));
  EXPECT_TRUE(segment_hits_rect({{1.5, 1.5}, {1.6, 1.6}}, box));  // inside
  EXPECT_TRUE(segment_hits_rect({{0, 1}, {3, 1}}, box));          // grazing an edge
  EXPECT_FALSE(segment_hits_rect({{0, 3}, {3, 3}}, box));
}

TEST(Geometry, SegmentHitsRectAgreesWithEdgeTests) {
  Rng rng(1);
  const Rect box{1, 1, 2, 2};
  for (int i = 0; i < 5000; ++i) {
    const Segment s{{rng.uniform(0, 3), rng.uniform(0, 3)}, {rng.uniform(0, 3), rng.uniform(0, 3)}};
    bool hit = box.contains(s.a) || box.contains(s.b);
    for (const auto& e : box.edges()) hit = hit || segments_intersect(s, e);
    EXPECT_EQ(segment_hits_rect(s, box), hit);
  }
}

TEST(Rng, ReproducibleAndForked) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(Rng(42).fork(1).next_u64(), Rng(42).fork(2).next_u64());
  EXPECT_EQ(Rng(42).fork(1).next_u64(), Rng(42).fork(1).next_u64());
  Rng c(7);
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = c.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = c.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / 20000, 0.0, 0.03);
  EXPECT_NEAR(sq / 20000, 1.0, 0.05);
}
