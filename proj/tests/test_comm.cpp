#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "swarmcomm/comm.hpp"
#include "swarmcomm/rng.hpp"

using namespace swarmcomm;

namespace {

std::vector<AgentState> agents(const std::vector<Vec2>& pos, double heading = 0.0, double body = 5.0) {
  std::vector<AgentState> s(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    s[i].id = i;
    s[i].position = pos[i];
    s[i].heading = heading;
    s[i].body_radius = body;
  }
  return s;
}

using Set = std::vector<std::size_t>;

// Random swarm in a box whose agents keep at least `min_gap` between centers.
std::vector<AgentState> spaced_swarm(Rng& rng, std::size_t n, double box, double min_gap) {
  std::vector<Vec2> pos;
  while (pos.size() < n) {
    const Vec2 p{rng.uniform(0, box), rng.uniform(0, box)};
    if (std::all_of(pos.begin(), pos.end(), [&](const Vec2& q) { return distance(p, q) >= min_gap; }))
      pos.push_back(p);
  }
  auto s = agents(pos);
  for (auto& a : s) a.heading = rng.angle();
  return s;
}

}  // namespace

TEST(MetricNeighbors, Examples) {
  EXPECT_EQ(metric_neighbors(0, std::vector<Vec2>{{0, 0}, {5, 0}, {30, 0}}, 10), (Set{1}));
  EXPECT_TRUE(metric_neighbors(0, std::vector<Vec2>{{0, 0}}, 10).empty());
  EXPECT_EQ(metric_neighbors(0, std::vector<Vec2>{{0, 0}, {10, 0}}, 10), (Set{1}));  // inclusive
}

TEST(MetricNeighbors, MatchesBruteForce) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pos;
    for (int k = 0; k < 50; ++k) pos.push_back({rng.uniform(0, 500), rng.uniform(0, 500)});
    for (std::size_t i = 0; i < pos.size(); ++i) {
      Set want;
      for (std::size_t j = 0; j < pos.size(); ++j)
        if (j != i && std::hypot(pos[j].x - pos[i].x, pos[j].y - pos[i].y) <= 100.0) want.push_back(j);
      EXPECT_EQ(metric_neighbors(i, pos, 100.0), want);
    }
  }
}

TEST(TopologicalNeighbors, Examples) {
  EXPECT_EQ(topological_neighbors(0, std::vector<Vec2>{{0, 0}, {1, 0}, {2, 0}, {3, 0}}, 2), (Set{1, 2}));
  std::vector<Vec2> five{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
  EXPECT_EQ(topological_neighbors(0, five, 7), (Set{1, 2, 3, 4}));
  // Indices 3 and 8 tie for the last slot; the lower index wins.
  std::vector<Vec2> tie(9, Vec2{100, 100});
  tie[0] = {0, 0};
  tie[1] = {1, 0};
  tie[3] = {0, 5};
  tie[8] = {5, 0};
  EXPECT_EQ(topological_neighbors(0, tie, 2), (Set{1, 3}));
}

TEST(TopologicalNeighbors, MatchesFullSort) {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pos;
    for (int k = 0; k < 50; ++k) pos.push_back({std::round(rng.uniform(0, 60)), std::round(rng.uniform(0, 60))});
    for (std::size_t i = 0; i < pos.size(); ++i) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t j = 0; j < pos.size(); ++j)
        if (j != i) all.push_back({distance2(pos[i], pos[j]), j});
      std::sort(all.begin(), all.end());
      Set want;
      for (std::size_t m = 0; m < 7; ++m) want.push_back(all[m].second);
      std::sort(want.begin(), want.end());
      EXPECT_EQ(topological_neighbors(i, pos, 7), want);
    }
  }
}

TEST(VisualNeighbors, Examples) {
  const VisualModel vis{707.1, 2.0 * std::numbers::pi / 3.0};
  // Candidate straight behind.
  EXPECT_TRUE(visual_neighbors(0, agents({{100, 100}, {80, 100}}), vis, {}).empty());
  // Agent at (10, 0) hides the one at (20, 0).
  EXPECT_EQ(visual_neighbors(0, agents({{0, 0}, {10, 0}, {20, 0}}), vis, {}), (Set{1}));
  // Just out of range.
  const VisualModel short_range{50.0, vis.phi};
  EXPECT_TRUE(visual_neighbors(0, agents({{0, 0}, {51, 0}}), short_range, {}).empty());
  EXPECT_TRUE(visual_neighbors(0, agents({{0, 0}, {50, 0}}), short_range, {}).empty());  // exclusive bound
  // An obstacle blocks the view.
  EXPECT_TRUE(visual_neighbors(0, agents({{0, 0}, {100, 0}}), vis, std::vector<Circle>{{{50, 0}, 10}}).empty());
}

TEST(VisualNeighbors, BodyOverlappingAnEndpointDoesNotOcclude) {
  const VisualModel vis{707.1, 2.0 * std::numbers::pi / 3.0};
  // Agent 1 sits 2 px from the viewer; its body covers the viewer's position.
  EXPECT_EQ(visual_neighbors(0, agents({{0, 0}, {2, 0}, {40, 0}}), vis, {}), (Set{1, 2}));
  // Agent 1 sits 3 px in front of the candidate.
  EXPECT_EQ(visual_neighbors(0, agents({{0, 0}, {37, 0}, {40, 0}}), vis, {}), (Set{1, 2}));
}

TEST(VisualNeighbors, MatchesCompositionOracle) {
  // Agents keep 6 px apart, more than one body radius, so no body covers
  // another agent's position and the overlap exemption never applies.
  Rng rng(23);
  const VisualModel vis{300.0, 2.0 * std::numbers::pi / 3.0};
  int checked = 0, linked = 0, hidden = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto s = spaced_swarm(rng, 30, 250, 6.0);
    std::vector<Circle> obstacles;
    for (int k = 0; k < 3; ++k) {
      const Circle c{{rng.uniform(0, 250), rng.uniform(0, 250)}, rng.uniform(5, 15)};
      if (std::all_of(s.begin(), s.end(), [&](const AgentState& a) { return distance(a.position, c.center) > c.radius + 1; }))
        obstacles.push_back(c);
    }
    WorldConfig world;
    world.obstacles = obstacles;
    const NeighborGraph g = build_graph(vis, s, world);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Set direct = visual_neighbors(i, s, vis, obstacles);
      EXPECT_EQ(direct, g.adjacency[i]);
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (j == i) continue;
        const Vec2 d = s[j].position - s[i].position;
        const double bearing = std::atan2(d.y, d.x);
        double off = std::abs(bearing - s[i].heading);
        off = std::min(off, 2 * std::numbers::pi - off);
        if (std::abs(off - vis.phi) < 1e-6) continue;
        const bool angle_ok = off <= vis.phi;
        const bool range_ok = d.norm() < vis.d_vis;
        std::vector<Circle> occ = obstacles;
        for (std::size_t k = 0; k < s.size(); ++k)
          if (k != i && k != j) occ.push_back(s[k].body());
        bool marginal = false, clear = true;
        for (const auto& o : occ) {
          const double t = std::clamp((o.center - s[i].position).dot(d) / d.norm2(), 0.0, 1.0);
          const double gap = distance(s[i].position + d * t, o.center);
          if (std::abs(gap - o.radius) < 0.02) marginal = true;
        }
        if (marginal) continue;
        for (int k = 1; k <= 1000 && clear; ++k) {
          const Vec2 p = s[i].position + d * (k / 1001.0);
          for (const auto& o : occ)
            if (distance2(p, o.center) < o.radius * o.radius) {
              clear = false;
              break;
            }
        }
        const bool want = angle_ok && range_ok && clear;
        const bool got = std::binary_search(direct.begin(), direct.end(), j);
        EXPECT_EQ(got, want) << "trial " << trial << " i " << i << " j " << j;
        ++checked;
        linked += want;
        hidden += angle_ok && range_ok && !clear;
      }
    }
  }
  EXPECT_GT(checked, 20000);
  EXPECT_GT(linked, 1000);
  EXPECT_GT(hidden, 1000);
}

TEST(BuildGraph, SixAgentLayout) {
  // Focal agent 0. Index 1 is hidden behind 2 and beyond d_met, 3 is visible
  // but beyond d_met, 4 is in range but behind, 5 is in range and visible.
  auto s = agents({{0, 0}, {40, 0}, {10, 0}, {0, 35}, {-20, 0}, {15, 15}});
  WorldConfig world;
  EXPECT_EQ(build_graph(MetricModel{30}, s, world).adjacency[0], (Set{2, 4, 5}));
  EXPECT_EQ(build_graph(TopologicalModel{4}, s, world).adjacency[0], (Set{2, 3, 4, 5}));
  EXPECT_EQ(build_graph(VisualModel{707.1, 2.0 * std::numbers::pi / 3.0}, s, world).adjacency[0], (Set{2, 3, 5}));
}

TEST(BuildGraph, SingleAgentAndCompleteGraph) {
  WorldConfig world;
  for (const CommModelConfig m : {CommModelConfig{MetricModel{10}}, CommModelConfig{TopologicalModel{7}},
                                  CommModelConfig{VisualModel{}}}) {
    const auto g = build_graph(m, agents({{5, 5}}), world);
    EXPECT_EQ(g.n, 1u);
    EXPECT_TRUE(g.adjacency[0].empty());
  }
  const auto g = build_graph(MetricModel{100}, agents({{0, 0}, {10, 0}, {0, 10}, {10, 10}}), world);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.adjacency[i].size(), 3u);
}

TEST(GraphProperties, MetricSymmetric) {
  Rng rng(24);
  WorldConfig world;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<Vec2> pos;
    for (std::size_t k = 0; k < n; ++k) pos.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
    const auto g = build_graph(MetricModel{rng.uniform(10, 80)}, agents(pos), world);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_TRUE(std::is_sorted(g.adjacency[i].begin(), g.adjacency[i].end()));
      for (std::size_t j : g.adjacency[i]) {
        EXPECT_NE(i, j);
        EXPECT_TRUE(std::binary_search(g.adjacency[j].begin(), g.adjacency[j].end(), i));
      }
    }
  }
}

TEST(GraphProperties, TopologicalOutDegree) {
  Rng rng(25);
  WorldConfig world;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t k = 1 + rng.below(10);
    std::vector<Vec2> pos;
    for (std::size_t m = 0; m < n; ++m) pos.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
    const auto g = build_graph(TopologicalModel{k}, agents(pos), world);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(g.adjacency[i].size(), std::min(k, n - 1));
      EXPECT_EQ(std::count(g.adjacency[i].begin(), g.adjacency[i].end(), i), 0);
    }
  }
}

TEST(GraphProperties, VisualWithinRangeAndEqualWithoutBlindspotOrOccluders) {
  Rng rng(26);
  WorldConfig world;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const double d_vis = rng.uniform(30, 200);
    std::vector<Vec2> pos;
    for (std::size_t m = 0; m < n; ++m) pos.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
    auto s = agents(pos);
    for (auto& a : s) a.heading = rng.angle();
    const auto g = build_graph(VisualModel{d_vis, 2.0 * std::numbers::pi / 3.0}, s, world);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j : g.adjacency[i]) EXPECT_LT(distance(pos[i], pos[j]), d_vis);

    auto bare = agents(pos, 0.0, 0.0);
    const auto open = build_graph(VisualModel{d_vis, std::numbers::pi}, bare, world);
    for (std::size_t i = 0; i < n; ++i) {
      Set want;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && distance(pos[i], pos[j]) < d_vis) want.push_back(j);
      EXPECT_EQ(open.adjacency[i], want);
    }
  }
}

TEST(GraphProperties, TopologicalNeverIsolated) {
  Rng rng(27);
  WorldConfig world;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 8 + rng.below(50);
    std::vector<Vec2> pos;
    for (std::size_t m = 0; m < n; ++m) pos.push_back({rng.uniform(0, 1000), rng.uniform(0, 1000)});
    const auto g = build_graph(TopologicalModel{7}, agents(pos), world);
    for (const auto& row : g.adjacency) EXPECT_FALSE(row.empty());
  }
}

TEST(BuildGraph, PureFunctionOfSnapshot) {
  Rng rng(28);
  auto s = spaced_swarm(rng, 60, 200, 3.0);
  WorldConfig world;
  world.obstacles = {{{100, 100}, 20}};
  const VisualModel vis{};
  const auto a = build_graph(vis, s, world);
  const auto b = build_graph(vis, s, world);
  EXPECT_EQ(a.adjacency, b.adjacency);
}

TEST(SpecialEntity, FollowsEachModel) {
  WorldConfig world;
  auto s = agents({{0, 0}, {10, 0}, {100, 0}});
  AgentState leader;
  leader.position = {20, 0};

  const auto met = build_graph(MetricModel{15}, s, world, leader);
  EXPECT_EQ(met.special_links, (std::vector<std::uint8_t>{0, 1, 0}));
  for (const auto& row : met.adjacency)
    for (std::size_t j : row) EXPECT_LT(j, s.size());

  // Topological with one slot: agent 0 prefers agent 1 (10 vs 20), agent 1
  // sees agent 0 and the leader tied at 10 and keeps the agent, agent 2 has
  // the leader nearest.
  const auto top1 = build_graph(TopologicalModel{1}, s, world, leader);
  EXPECT_EQ(top1.special_links, (std::vector<std::uint8_t>{0, 0, 1}));
  AgentState tied;
  tied.position = {-10, 0};
  EXPECT_EQ(build_graph(TopologicalModel{1}, s, world, tied).special_links[0], 0);
  EXPECT_EQ(build_graph(TopologicalModel{2}, s, world, tied).special_links[0], 1);

  // Visual: agent 1 hides the leader from agent 0; agent 2 faces away.
  const auto vis = build_graph(VisualModel{}, s, world, leader);
  EXPECT_EQ(vis.special_links[0], 0);
  EXPECT_EQ(vis.special_links[1], 1);
  EXPECT_EQ(vis.special_links[2], 0);
}

TEST(SpecialEntity, LeaderBodyOccludesAgents) {
  WorldConfig world;
  auto s = agents({{0, 0}, {40, 0}});
  AgentState leader;
  leader.position = {20, 0};
  EXPECT_TRUE(build_graph(VisualModel{}, s, world, leader).adjacency[0].empty());
  EXPECT_EQ(build_graph(VisualModel{}, s, world).adjacency[0], (Set{1}));
}
