#pragma once
/**
 * @file tasks.hpp
 * @brief The six swarm tasks: task steering, auxiliary entities, spawn
 *        layout and per-iteration bookkeeping.
 *
 *   Targets   no task force; targets are discovered within 10 px
 *   Goal      aware agents head for the goal; awareness spreads one hop
 *             per iteration along communication links
 *   Rally     informed agents head for the rally point and never share it
 *   Disperse  constant radial push away from the world center
 *   Avoid     a predator on a fixed straight path repels agents within r_a
 *   Follow    agents linked to a randomly walking leader are pulled to it
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "swarmcomm/agent.hpp"
#include "swarmcomm/comm.hpp"
#include "swarmcomm/dynamics.hpp"
#include "swarmcomm/geometry.hpp"
#include "swarmcomm/rng.hpp"
#include "swarmcomm/world.hpp"

namespace swarmcomm {

inline constexpr double kDiscoveryRadius = 10.0;  // target found within this distance
inline constexpr double kReachRadius = 50.0;      // goal / rally disc
inline constexpr double kObstacleRadius = 25.0;
inline constexpr int kMaxPlacementAttempts = 10000;

struct TargetsTask {
  std::size_t n_targets{8};
  std::size_t n_obstacles{5};
};

struct GoalTask {
  std::size_t n_obstacles{5};
  std::optional<Vec2> goal;  ///< placed by the trial RNG when unset
  double omega{0.5};
};

struct RallyTask {
  double p_informed{0.16};
  std::size_t groups{1};
  std::optional<Vec2> rally_point;
  double omega{0.5};
};

struct DisperseTask {
  std::size_t n_obstacles{5};
  double strength{0.9};  ///< fraction of the unit swarm force
  std::optional<Vec2> center;
};

/// Predefined straight traversal.
struct PathSpec {
  Vec2 entry;
  Vec2 direction{1.0, 0.0};
  double speed{2.0};
};

struct AvoidTask {
  std::optional<PathSpec> path;  ///< through the world center from a random edge when unset
};

/// Random walk: heading jitters by uniform(-sigma, sigma) each iteration.
struct WalkSpec {
  double sigma{0.15};
  std::optional<double> speed;  ///< defaults to the agent speed
};

struct FollowTask {
  WalkSpec walk;
};

using TaskSpec = std::variant<TargetsTask, GoalTask, RallyTask, DisperseTask, AvoidTask, FollowTask>;

enum class TaskKind { Targets, Goal, Rally, Disperse, Avoid, Follow };

inline TaskKind task_kind(const TaskSpec& t) { return static_cast<TaskKind>(t.index()); }

inline std::string task_name(TaskKind k) {
  switch (k) {
    case TaskKind::Targets: return "targets";
    case TaskKind::Goal: return "goal";
    case TaskKind::Rally: return "rally";
    case TaskKind::Disperse: return "disperse";
    case TaskKind::Avoid: return "avoid";
    case TaskKind::Follow: return "follow";
  }
  return "?";
}

inline std::optional<TaskKind> parse_task_kind(const std::string& s) {
  for (auto k : {TaskKind::Targets, TaskKind::Goal, TaskKind::Rally, TaskKind::Disperse, TaskKind::Avoid,
                 TaskKind::Follow})
    if (task_name(k) == s) return k;
  return std::nullopt;
}

inline std::size_t obstacle_count(const TaskSpec& t) {
  if (auto* x = std::get_if<TargetsTask>(&t)) return x->n_obstacles;
  if (auto* x = std::get_if<GoalTask>(&t)) return x->n_obstacles;
  if (auto* x = std::get_if<DisperseTask>(&t)) return x->n_obstacles;
  return 0;
}

struct Target {
  Vec2 position;
  bool discovered{false};
};

struct TaskState {
  std::vector<Target> targets;
  std::optional<Vec2> attractor;  ///< goal or rally point
  Vec2 center;                    ///< Disperse center
  std::vector<std::uint8_t> reached;  ///< agent ever inside the goal / rally disc
  std::optional<std::size_t> first_aware_iter;
  std::optional<std::size_t> all_aware_iter;

  std::optional<AgentState> predator;
  PathSpec predator_path;
  std::optional<AgentState> leader;
  double leader_speed{0.0};

  // Follow bookkeeping
  std::vector<std::size_t> follow_count;
  std::vector<std::uint8_t> ever_connected;
  std::size_t swarm_follow_iters{0};

  // Rally bookkeeping: per iteration, uninformed agents with an informed neighbor
  std::vector<std::size_t> influenced_counts;
  std::size_t uninformed{0};

  /// Leader or predator, whichever the task has.
  const std::optional<AgentState>& special() const { return leader ? leader : predator; }
};

/// Per-trial quantities init_trial needs besides the task itself.
struct TrialSetup {
  std::size_t n_agents{50};
  RadiiConfig radii;
  double speed{2.0};
  double body_radius{5.0};
  double obstacle_radius{kObstacleRadius};
};

/// Placement could not be satisfied within the attempt budget.
struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

inline TaskForce task_force(const TaskSpec& task, std::size_t i, const NeighborGraph& graph,
                            std::span<const AgentState> states, const TaskState& ts, const RadiiConfig& radii) {
  const AgentState& a = states[i];
  return std::visit(
      [&](const auto& t) -> TaskForce {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, TargetsTask>) {
          return {};
        } else if constexpr (std::is_same_v<T, GoalTask>) {
          if (!a.aware || !ts.attractor) return {};
          return {unit(*ts.attractor - a.position), t.omega};
        } else if constexpr (std::is_same_v<T, RallyTask>) {
          if (!a.informed || !ts.attractor) return {};
          return {unit(*ts.attractor - a.position), t.omega};
        } else if constexpr (std::is_same_v<T, DisperseTask>) {
          return {unit(a.position - ts.center), t.strength};
        } else if constexpr (std::is_same_v<T, AvoidTask>) {
          if (!ts.predator) return {};
          if (distance2(a.position, ts.predator->position) > radii.r_a * radii.r_a) return {};
          return {unit(a.position - ts.predator->position), 1.0};
        } else {
          if (!ts.leader || !graph.special_linked(i)) return {};
          return {unit(ts.leader->position - a.position), 1.0};
        }
      },
      task);
}

/// Moves the predator or leader one iteration. Called right after the swarm
/// moves, before the next graph is built.
inline void advance_task_entities(const TaskSpec& task, TaskState& ts, const WorldConfig& world, Rng& rng) {
  if (std::holds_alternative<AvoidTask>(task) && ts.predator) {
    ts.predator->position += ts.predator_path.direction * ts.predator_path.speed;
  } else if (auto* f = std::get_if<FollowTask>(&task); f && ts.leader) {
    AgentState& l = *ts.leader;
    l.heading = wrap_angle(l.heading + rng.uniform(-f->walk.sigma, f->walk.sigma));
    Vec2 p = l.position + heading_vector(l.heading) * ts.leader_speed;
    if (p.x < 0.0 || p.x > world.width) {
      p.x = p.x < 0.0 ? -p.x : 2.0 * world.width - p.x;
      l.heading = wrap_angle(std::numbers::pi - l.heading);
    }
    if (p.y < 0.0 || p.y > world.height) {
      p.y = p.y < 0.0 ? -p.y : 2.0 * world.height - p.y;
      l.heading = wrap_angle(-l.heading);
    }
    l.position = clamp_to_world(p, world);
  }
}

namespace detail {

inline std::vector<std::vector<std::size_t>> symmetrized(const NeighborGraph& g) {
  std::vector<std::vector<std::size_t>> und(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j : g.adjacency[i]) {
      und[i].push_back(j);
      und[j].push_back(i);
    }
  for (auto& a : und) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return und;
}

}  // namespace detail

/// Iteration-t bookkeeping after movement: discovery, awareness, reach,
/// leader-follow and informed-influence counts. `graph` is built from
/// `states` (and the current special entity).
inline void update_task_state(const TaskSpec& task, const NeighborGraph& graph, std::vector<AgentState>& states,
                              TaskState& ts, std::size_t t) {
  const std::size_t n = states.size();
  const double reach2 = kReachRadius * kReachRadius;

  switch (task_kind(task)) {
    case TaskKind::Targets: {
      const double d2 = kDiscoveryRadius * kDiscoveryRadius;
      for (auto& target : ts.targets) {
        if (target.discovered) continue;
        for (const auto& a : states)
          if (distance2(a.position, target.position) <= d2) {
            target.discovered = true;
            break;
          }
      }
      break;
    }
    case TaskKind::Goal: {
      // One hop per iteration: only agents aware before this update relay.
      std::vector<std::uint8_t> was_aware(n);
      for (std::size_t i = 0; i < n; ++i) was_aware[i] = states[i].aware;
      for (std::size_t i = 0; i < n; ++i)
        if (was_aware[i])
          for (std::size_t j : graph.adjacency[i]) states[j].aware = true;
      for (std::size_t i = 0; i < n; ++i)
        if (ts.attractor && distance2(states[i].position, *ts.attractor) <= reach2) {
          states[i].aware = true;
          ts.reached[i] = 1;
        }
      const auto aware = static_cast<std::size_t>(
          std::count_if(states.begin(), states.end(), [](const AgentState& a) { return a.aware; }));
      if (aware > 0 && !ts.first_aware_iter) ts.first_aware_iter = t;
      if (n > 0 && aware == n && !ts.all_aware_iter) ts.all_aware_iter = t;
      break;
    }
    case TaskKind::Rally: {
      for (std::size_t i = 0; i < n; ++i)
        if (ts.attractor && distance2(states[i].position, *ts.attractor) <= reach2) ts.reached[i] = 1;
      if (t == 0) break;
      std::size_t influenced = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (states[i].informed) continue;
        for (std::size_t j : graph.adjacency[i])
          if (states[j].informed) {
            ++influenced;
            break;
          }
      }
      ts.influenced_counts.push_back(influenced);
      break;
    }
    case TaskKind::Follow: {
      if (t == 0 || !graph.has_special()) break;
      bool any = false;
      for (std::size_t i = 0; i < n; ++i)
        if (graph.special_linked(i)) {
          ++ts.follow_count[i];
          any = true;
        }
      if (!any) break;
      ++ts.swarm_follow_iters;
      // Indirect followers: graph-connected to a direct follower right now.
      const auto und = detail::symmetrized(graph);
      std::vector<std::uint8_t> seen(n, 0);
      std::vector<std::size_t> frontier;
      for (std::size_t i = 0; i < n; ++i)
        if (graph.special_linked(i)) {
          seen[i] = 1;
          frontier.push_back(i);
        }
      while (!frontier.empty()) {
        const std::size_t u = frontier.back();
        frontier.pop_back();
        ts.ever_connected[u] = 1;
        for (std::size_t v : und[u])
          if (!seen[v]) {
            seen[v] = 1;
            frontier.push_back(v);
          }
      }
      break;
    }
    case TaskKind::Disperse:
    case TaskKind::Avoid:
      break;
  }
}

// ---------------------------------------------------------------------------
// Trial initialization

namespace detail {

template <typename Ok>
Vec2 sample_point(Rng& rng, const WorldConfig& world, double margin, Ok ok, const char* what) {
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    const Vec2 p{rng.uniform(margin, world.width - margin), rng.uniform(margin, world.height - margin)};
    if (ok(p)) return p;
  }
  throw PlacementError(std::string("placement infeasible: ") + what);
}

}  // namespace detail

struct TrialInit {
  std::vector<AgentState> states;
  TaskState task_state;
};

/// Spawns the swarm and task entities. Obstacles are appended to `world`.
///
/// Spawn layout: one disc of radius 3 r_a at the world center (Targets, Goal,
/// Avoid, Follow), a disc of radius 2 r_a at the center (Disperse) or g discs
/// of radius 3 r_a at random separated centers (Rally).
inline TrialInit init_trial(const TaskSpec& task, const TrialSetup& setup, WorldConfig& world, Rng& rng) {
  setup.radii.validate();
  const std::size_t n = setup.n_agents;
  const double r_a = setup.radii.r_a;
  const TaskKind kind = task_kind(task);
  const Vec2 center = world.center();

  TrialInit out;
  TaskState& ts = out.task_state;
  ts.center = center;
  if (auto* d = std::get_if<DisperseTask>(&task); d && d->center) ts.center = *d->center;

  // Spawn regions.
  std::vector<Circle> spawns;
  std::vector<std::size_t> spawn_sizes;
  if (auto* rally = std::get_if<RallyTask>(&task)) {
    const std::size_t g = std::max<std::size_t>(1, rally->groups);
    const double spread = 3.0 * r_a;
    for (std::size_t k = 0; k < g; ++k) {
      const Vec2 c = detail::sample_point(
          rng, world, spread,
          [&](const Vec2& p) {
            return std::all_of(spawns.begin(), spawns.end(),
                               [&](const Circle& s) { return distance(p, s.center) >= spread; });
          },
          "rally group centers");
      spawns.push_back({c, spread});
      spawn_sizes.push_back(n / g + (k < n % g ? 1 : 0));
    }
  } else {
    const double spread = (kind == TaskKind::Disperse ? 2.0 : 3.0) * r_a;
    spawns.push_back({kind == TaskKind::Disperse ? ts.center : center, spread});
    spawn_sizes.push_back(n);
  }

  const auto clear_of_spawns = [&](const Vec2& p, double pad) {
    return std::all_of(spawns.begin(), spawns.end(),
                       [&](const Circle& s) { return distance(p, s.center) >= s.radius + pad; });
  };

  // Obstacles avoid each other, the spawn regions and the central disperse disc.
  const double orad = setup.obstacle_radius;
  world.obstacles.clear();
  for (std::size_t k = 0; k < obstacle_count(task); ++k) {
    const Vec2 c = detail::sample_point(
        rng, world, orad + 1.0,
        [&](const Vec2& p) {
          if (!clear_of_spawns(p, orad + 10.0)) return false;
          if (distance(p, center) < 2.0 * r_a + orad + 10.0) return false;
          return std::all_of(world.obstacles.begin(), world.obstacles.end(),
                             [&](const Circle& o) { return distance(p, o.center) >= o.radius + orad + 10.0; });
        },
        "obstacles");
    world.obstacles.push_back({c, orad});
  }
  const auto clear_of_obstacles = [&](const Vec2& p, double pad) {
    return std::all_of(world.obstacles.begin(), world.obstacles.end(),
                       [&](const Circle& o) { return distance(p, o.center) >= o.radius + pad; });
  };

  // Agents.
  out.states.reserve(n);
  for (std::size_t s = 0; s < spawns.size(); ++s)
    for (std::size_t k = 0; k < spawn_sizes[s]; ++k) {
      AgentState a;
      a.id = out.states.size();
      a.position = clamp_to_world(rng.in_disc(spawns[s].center, spawns[s].radius), world);
      a.heading = rng.angle();
      a.speed = setup.speed;
      a.body_radius = setup.body_radius;
      out.states.push_back(a);
    }

  ts.reached.assign(n, 0);
  switch (kind) {
    case TaskKind::Targets: {
      const auto& t = std::get<TargetsTask>(task);
      for (std::size_t k = 0; k < t.n_targets; ++k) {
        const Vec2 p = detail::sample_point(
            rng, world, kDiscoveryRadius,
            [&](const Vec2& q) { return clear_of_spawns(q, kDiscoveryRadius) && clear_of_obstacles(q, kDiscoveryRadius); },
            "targets");
        ts.targets.push_back({p, false});
      }
      break;
    }
    case TaskKind::Goal: {
      const auto& t = std::get<GoalTask>(task);
      ts.attractor = t.goal ? *t.goal
                            : detail::sample_point(
                                  rng, world, kReachRadius,
                                  [&](const Vec2& q) {
                                    return clear_of_spawns(q, kReachRadius + 10.0) && clear_of_obstacles(q, kReachRadius);
                                  },
                                  "goal");
      break;
    }
    case TaskKind::Rally: {
      const auto& t = std::get<RallyTask>(task);
      ts.attractor = t.rally_point ? *t.rally_point
                                   : detail::sample_point(
                                         rng, world, kReachRadius,
                                         [&](const Vec2& q) { return clear_of_spawns(q, kReachRadius + 10.0); },
                                         "rally point");
      const auto informed =
          std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(t.p_informed * static_cast<double>(n))));
      std::vector<std::size_t> idx(n);
      for (std::size_t k = 0; k < n; ++k) idx[k] = k;
      for (std::size_t k = 0; k < informed; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.below(n - k));
        std::swap(idx[k], idx[pick]);
        out.states[idx[k]].informed = true;
      }
      ts.uninformed = n - informed;
      break;
    }
    case TaskKind::Avoid: {
      const auto& t = std::get<AvoidTask>(task);
      if (t.path) {
        ts.predator_path = *t.path;
      } else {
        const auto edge = rng.below(4);
        const double u = rng.uniform(0.25, 0.75);
        const Vec2 entries[4] = {{0.0, u * world.height},
                                 {world.width, u * world.height},
                                 {u * world.width, 0.0},
                                 {u * world.width, world.height}};
        ts.predator_path.entry = entries[edge];
        ts.predator_path.direction = unit(center - entries[edge]);
        ts.predator_path.speed = setup.speed;
      }
      AgentState p;
      p.id = n;
      p.position = ts.predator_path.entry;
      p.heading = std::atan2(ts.predator_path.direction.y, ts.predator_path.direction.x);
      p.speed = ts.predator_path.speed;
      p.body_radius = setup.body_radius;
      ts.predator = p;
      for (auto& a : out.states) {
        const Vec2 d = p.position - a.position;
        a.heading = std::atan2(d.y, d.x);
      }
      break;
    }
    case TaskKind::Follow: {
      const auto& t = std::get<FollowTask>(task);
      AgentState l;
      l.id = n;
      l.position = center;
      l.heading = rng.angle();
      l.body_radius = setup.body_radius;
      ts.leader_speed = t.walk.speed.value_or(setup.speed);
      l.speed = ts.leader_speed;
      ts.leader = l;
      ts.follow_count.assign(n, 0);
      ts.ever_connected.assign(n, 0);
      break;
    }
    case TaskKind::Disperse:
      break;
  }
  return out;
}

}  // namespace swarmcomm
