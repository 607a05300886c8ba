#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "swarmcomm/rng.hpp"
#include "swarmcomm/world.hpp"

using namespace swarmcomm;

namespace {

// Reference: test 1000 evenly spaced points strictly inside the segment.
bool sampled_clear(const Vec2& a, const Vec2& b, const std::vector<Circle>& occ) {
  for (int k = 1; k <= 1000; ++k) {
    const double t = k / 1001.0;
    const Vec2 p = a + (b - a) * t;
    for (const auto& o : occ)
      if (distance2(p, o.center) < o.radius * o.radius) return false;
  }
  return true;
}

AgentState at(Vec2 p, double heading = 0.0) {
  AgentState a;
  a.position = p;
  a.heading = heading;
  return a;
}

}  // namespace

TEST(SegmentClear, Examples) {
  const Vec2 a{0, 0}, b{10, 0};
  EXPECT_TRUE(segment_clear(a, b, std::vector<Circle>{{{5, 5}, 1}}));
  EXPECT_FALSE(segment_clear(a, b, std::vector<Circle>{{{5, 0}, 1}}));
  EXPECT_TRUE(segment_clear(a, b, std::vector<Circle>{{{12, 0}, 1}}));
}

TEST(SegmentClear, DegenerateSegmentIsClear) {
  EXPECT_TRUE(segment_clear({3, 3}, {3, 3}, std::vector<Circle>{{{3, 3}, 5}}));
}

TEST(SegmentClear, TouchingOnlyAnEndpointDoesNotBlock) {
  EXPECT_TRUE(segment_clear({0, 0}, {10, 0}, std::vector<Circle>{{{13, 0}, 3}}));
  EXPECT_TRUE(segment_clear({0, 0}, {10, 0}, std::vector<Circle>{{{5, 2}, 2}}));  // tangent
}

TEST(SegmentClear, MatchesPointSamplingOracle) {
  Rng rng(11);
  int agree = 0, blocked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Vec2 a{rng.uniform(0, 100), rng.uniform(0, 100)};
    const Vec2 b{rng.uniform(0, 100), rng.uniform(0, 100)};
    std::vector<Circle> occ;
    const int k = 1 + static_cast<int>(rng.below(4));
    for (int m = 0; m < k; ++m) occ.push_back({{rng.uniform(0, 100), rng.uniform(0, 100)}, rng.uniform(1, 12)});
    // Skip configurations within a hair of tangency, where 1000 samples cannot decide.
    bool marginal = false;
    for (const auto& o : occ) {
      const Vec2 ab = b - a;
      const double t = std::clamp((o.center - a).dot(ab) / ab.norm2(), 0.0, 1.0);
      const double d = distance(a + ab * t, o.center);
      if (std::abs(d - o.radius) < 0.05 || distance(a, o.center) < o.radius + 0.2 ||
          distance(b, o.center) < o.radius + 0.2)
        marginal = true;
    }
    if (marginal) continue;
    const bool got = segment_clear(a, b, occ);
    EXPECT_EQ(got, sampled_clear(a, b, occ)) << "trial " << trial;
    ++agree;
    blocked += got ? 0 : 1;
  }
  EXPECT_GE(agree, 200);
  EXPECT_GT(blocked, 20);
}

TEST(SegmentClear, SymmetricAndMonotone) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec2 a{rng.uniform(0, 50), rng.uniform(0, 50)};
    const Vec2 b{rng.uniform(0, 50), rng.uniform(0, 50)};
    std::vector<Circle> occ;
    for (int m = 0; m < 3; ++m) occ.push_back({{rng.uniform(0, 50), rng.uniform(0, 50)}, rng.uniform(1, 6)});
    EXPECT_EQ(segment_clear(a, b, occ), segment_clear(b, a, occ));
    const bool before = segment_clear(a, b, occ);
    occ.push_back({{rng.uniform(0, 50), rng.uniform(0, 50)}, rng.uniform(1, 6)});
    EXPECT_TRUE(before || !segment_clear(a, b, occ));
  }
}

TEST(EnvForce, Examples) {
  WorldConfig w;
  EXPECT_GT(env_force(at({5, 500}), w).x, 0.0);
  const Vec2 interior = env_force(at({500, 500}), w);
  EXPECT_EQ(interior.x, 0.0);
  EXPECT_EQ(interior.y, 0.0);
  w.obstacles.push_back({{535, 500}, 25});  // surface 10 px east of the agent
  EXPECT_LT(env_force(at({500, 500}), w).x, 0.0);
}

TEST(EnvForce, ZeroOrUnitWithPositiveInwardComponent) {
  WorldConfig w;
  w.obstacles = {{{300, 300}, 25}, {{700, 650}, 25}};
  Rng rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const AgentState a = at({rng.uniform(0, 1000), rng.uniform(0, 1000)}, rng.angle());
    const Vec2 f = env_force(a, w);
    if (f.norm() == 0.0) continue;
    EXPECT_NEAR(f.norm(), 1.0, 1e-12);
    // Inward normal of the nearest surface.
    const Vec2 p = a.position;
    double best = p.x;
    Vec2 n{1, 0};
    if (w.width - p.x < best) best = w.width - p.x, n = {-1, 0};
    if (p.y < best) best = p.y, n = {0, 1};
    if (w.height - p.y < best) best = w.height - p.y, n = {0, -1};
    for (const auto& o : w.obstacles)
      if (distance(p, o.center) - o.radius < best) best = distance(p, o.center) - o.radius, n = unit(p - o.center);
    EXPECT_LE(best, w.wall_margin);
    EXPECT_GT(f.dot(n), 0.0);
  }
}

TEST(EnvForce, OutsideBoundsGivesInwardNormal) {
  WorldConfig w;
  const Vec2 f = env_force(at({-3, 50}), w);
  EXPECT_EQ(f.x, 1.0);
  EXPECT_EQ(f.y, 0.0);
  const Vec2 g = env_force(at({500, 1004}), w);
  EXPECT_EQ(g.y, -1.0);
}

TEST(ClampToWorld, Examples) {
  WorldConfig w;
  EXPECT_EQ(clamp_to_world({-3, 50}, w), (Vec2{0, 50}));
  EXPECT_EQ(clamp_to_world({500, 500}, w), (Vec2{500, 500}));
  EXPECT_EQ(clamp_to_world({1200, -1}, w), (Vec2{1000, 0}));
}

TEST(WrapAngle, RangeAndIdentity) {
  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    const double a = rng.uniform(-50, 50);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -std::numbers::pi);
    EXPECT_LE(w, std::numbers::pi);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-9);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-9);
  }
  EXPECT_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
}

TEST(Rng, ReproducibleAndSeedSensitive) {
  Rng a(5), b(5), c(6);
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  Rng d(5);
  EXPECT_NE(d.next(), c.next());
  EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
  EXPECT_EQ(trial_seed(1, 7), mix64(1 ^ mix64(7)));
}

TEST(Rng, BelowIsInRange) {
  Rng r(9);
  std::vector<int> hits(7, 0);
  for (int k = 0; k < 7000; ++k) ++hits[r.below(7)];
  for (int h : hits) EXPECT_GT(h, 800);
}
