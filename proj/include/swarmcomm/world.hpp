#pragma once
/**
 * @file world.hpp
 * @brief Bounded rectangular world with circular obstacles.
 *
 * The world spans [0, width] x [0, height]. Walls and obstacle surfaces push
 * agents back through a unit steering vector (see env_force) that enters the
 * environmental term of the force sum.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarmcomm/agent.hpp"
#include "swarmcomm/geometry.hpp"

namespace swarmcomm {

struct WorldConfig {
  double width{1000.0};
  double height{1000.0};
  std::vector<Circle> obstacles;
  double wall_margin{20.0};
  /// Rotation applied to the inward normal, toward the side the agent is
  /// already turning, so agents glance off surfaces instead of reversing.
  /// Must satisfy |steer_offset| < pi/2.
  double steer_offset{std::numbers::pi / 4.0};

  double diagonal() const { return std::hypot(width, height); }
  Vec2 center() const { return {width / 2.0, height / 2.0}; }

  void validate() const {
    if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("world: width and height must be positive");
    if (!(wall_margin >= 0.0)) throw std::invalid_argument("world: wall_margin must be non-negative");
    if (!(std::abs(steer_offset) < std::numbers::pi / 2.0))
      throw std::invalid_argument("world: |steer_offset| must be below pi/2");
    for (const auto& o : obstacles) {
      if (!(o.radius > 0.0)) throw std::invalid_argument("world: obstacle radius must be positive");
      if (o.center.x - o.radius < 0.0 || o.center.x + o.radius > width || o.center.y - o.radius < 0.0 ||
          o.center.y + o.radius > height)
        throw std::invalid_argument("world: obstacle outside bounds");
    }
  }
};

inline bool in_bounds(const Vec2& p, const WorldConfig& world) {
  return p.x >= 0.0 && p.x <= world.width && p.y >= 0.0 && p.y <= world.height;
}

inline Vec2 clamp_to_world(const Vec2& p, const WorldConfig& world) {
  return {std::clamp(p.x, 0.0, world.width), std::clamp(p.y, 0.0, world.height)};
}

/// True iff no occluder disc meets the open segment between `a` and `b`.
/// Degenerate segments (a == b) are always clear.
inline bool segment_clear(const Vec2& a, const Vec2& b, std::span<const Circle> occluders) {
  if (a == b) return true;
  for (const auto& o : occluders)
    if (disc_blocks_segment(a, b, o.center, o.radius)) return false;
  return true;
}

namespace detail {

/// Unit normal pointing back into the world from the most-violated wall.
inline Vec2 inward_normal_outside(const Vec2& p, const WorldConfig& world) {
  const double over[4] = {-p.x, p.x - world.width, -p.y, p.y - world.height};
  const Vec2 normals[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  return normals[std::max_element(over, over + 4) - over];
}

}  // namespace detail

/// Environmental steering for one agent.
///
/// Returns the zero vector unless the agent is within `wall_margin` of a wall
/// or obstacle surface; otherwise a unit vector whose component along the
/// inward normal of the nearest surface is positive. Positions outside the
/// world are clamped first and answered with the plain inward normal; callers
/// detect that case with in_bounds() and count it.
inline Vec2 env_force(const AgentState& agent, const WorldConfig& world) {
  if (!in_bounds(agent.position, world)) return detail::inward_normal_outside(agent.position, world);
  const Vec2 p = agent.position;

  double nearest = std::numeric_limits<double>::infinity();
  Vec2 normal;
  const auto consider = [&](double gap, Vec2 n) {
    if (gap < nearest) {
      nearest = gap;
      normal = n;
    }
  };
  consider(p.x, {1, 0});
  consider(world.width - p.x, {-1, 0});
  consider(p.y, {0, 1});
  consider(world.height - p.y, {0, -1});
  for (const auto& o : world.obstacles) {
    const Vec2 away = p - o.center;
    const Vec2 n = away.norm2() > 0.0 ? unit(away) : Vec2{1, 0};
    consider(away.norm() - o.radius, n);
  }
  if (nearest > world.wall_margin) return {};

  // Turn toward whichever side of the normal the heading already leans.
  const double side = normal.cross(heading_vector(agent.heading));
  const double offset = side >= 0.0 ? world.steer_offset : -world.steer_offset;
  return unit(rotate(normal, offset));
}

}  // namespace swarmcomm
