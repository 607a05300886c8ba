#pragma once
/**
 * @file dynamics.hpp
 * @brief Force accumulation and the synchronous heading/position update.
 *
 * Each agent sums three steering terms,
 *
 *     F = w_env * unit(F_env) + w_swarm * unit(F_r + F_o + F_a) + w_task * unit(F_task),
 *
 * where F_r, F_o and F_a are the repulsion, orientation and attraction sums
 * over the agent's neighbors, each already reduced to a unit vector. Zones are
 * half-open: [0, r_r) repels, [r_r, r_o) aligns, [r_o, r_a) attracts and
 * anything farther contributes nothing.
 *
 * The heading then turns toward atan2(F) by at most max_turn and the agent
 * advances by its speed. All agents read the same time-t snapshot.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarmcomm/agent.hpp"
#include "swarmcomm/comm.hpp"
#include "swarmcomm/geometry.hpp"
#include "swarmcomm/rng.hpp"
#include "swarmcomm/world.hpp"

namespace swarmcomm {

struct RadiiConfig {
  double r_r{10.0};
  double r_o{15.0};
  double r_a{22.5};

  void validate() const {
    if (!(0.0 < r_r && r_r < r_o && r_o < r_a))
      throw std::invalid_argument("radii: require 0 < r_r < r_o < r_a");
  }
};

struct SwarmTerms {
  Vec2 f_r, f_o, f_a;
  std::size_t coincident{0};  ///< neighbors sitting exactly on the agent
};

/// Keys the random direction used for coincident pairs so the draw does not
/// depend on agent processing order.
struct JitterKey {
  std::uint64_t seed{0};
  std::uint64_t iteration{0};
};

inline SwarmTerms swarm_force(std::size_t i, const NeighborGraph& graph, std::span<const AgentState> states,
                              const RadiiConfig& radii, JitterKey jitter = {}) {
  SwarmTerms out;
  const Vec2 pi = states[i].position;
  const double rr2 = radii.r_r * radii.r_r;
  const double ro2 = radii.r_o * radii.r_o;
  const double ra2 = radii.r_a * radii.r_a;
  for (std::size_t j : graph.adjacency[i]) {
    const Vec2 d = states[j].position - pi;
    const double d2 = d.norm2();
    if (d2 < rr2) {
      if (d2 == 0.0) {
        // Direction is undefined; repel along a keyed random direction.
        out.f_r += keyed_direction(jitter.seed, jitter.iteration, i, j);
        ++out.coincident;
      } else {
        out.f_r -= unit(d);
      }
    } else if (d2 < ro2) {
      out.f_o += heading_vector(states[j].heading);
    } else if (d2 < ra2) {
      out.f_a += unit(d);
    }
  }
  out.f_r = unit(out.f_r);
  out.f_o = unit(out.f_o);
  out.f_a = unit(out.f_a);
  return out;
}

struct ForceWeights {
  double env{1.0};
  double swarm{1.0};
};

/// Task steering handed to total_force: a direction and its weight.
struct TaskForce {
  Vec2 direction;
  double weight{0.0};
};

/// f_r, f_o, f_a are the unit zone terms and swarm_sum = f_r + f_o + f_a.
/// f_env, f_swarm and f_task are the weighted unit contributions, so that
/// f_total = f_env + f_swarm + f_task.
struct ForceBreakdown {
  Vec2 f_env, f_swarm, f_r, f_o, f_a, f_task, f_total;
  Vec2 swarm_sum;
  std::size_t coincident{0};
};

inline ForceBreakdown total_force(std::size_t i, const WorldConfig& world, const NeighborGraph& graph,
                                  std::span<const AgentState> states, const TaskForce& task,
                                  const RadiiConfig& radii, const ForceWeights& weights = {}, JitterKey jitter = {}) {
  ForceBreakdown b;
  const SwarmTerms s = swarm_force(i, graph, states, radii, jitter);
  b.f_r = s.f_r;
  b.f_o = s.f_o;
  b.f_a = s.f_a;
  b.coincident = s.coincident;
  b.swarm_sum = s.f_r + s.f_o + s.f_a;
  b.f_env = unit(env_force(states[i], world)) * weights.env;
  b.f_swarm = unit(b.swarm_sum) * weights.swarm;
  b.f_task = unit(task.direction) * task.weight;
  b.f_total = b.f_env + b.f_swarm + b.f_task;
  return b;
}

/// Heading after turning from `current` toward `desired` by at most
/// `max_turn`. An exact reversal turns counterclockwise.
inline double turn_toward(double current, double desired, double max_turn) {
  const double delta = wrap_angle(desired - current);
  if (std::abs(delta) <= max_turn) return wrap_angle(desired);
  return wrap_angle(current + (delta > 0.0 ? max_turn : -max_turn));
}

/// Synchronous update of every agent from its force at time t.
inline std::vector<AgentState> step(std::span<const AgentState> states, std::span<const ForceBreakdown> forces,
                                    const WorldConfig& world, double max_turn) {
  if (states.size() != forces.size()) throw std::invalid_argument("step: one force per agent required");
  std::vector<AgentState> next(states.begin(), states.end());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Vec2 f = forces[i].f_total;
    const double desired = f.norm() > kZeroForce ? std::atan2(f.y, f.x) : states[i].heading;
    next[i].heading = turn_toward(states[i].heading, desired, max_turn);
    next[i].position = clamp_to_world(states[i].position + heading_vector(next[i].heading) * states[i].speed, world);
  }
  return next;
}

}  // namespace swarmcomm
