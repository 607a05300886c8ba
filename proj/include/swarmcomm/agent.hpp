#pragma once

#include <cstddef>

#include "swarmcomm/geometry.hpp"

namespace swarmcomm {

/// One self-propelled particle. Speed is constant within a trial; only the
/// heading is steered.
struct AgentState {
  std::size_t id{0};
  Vec2 position;
  double heading{0.0};  ///< radians in (-pi, pi]
  double speed{2.0};    ///< pixels per iteration
  double body_radius{5.0};
  bool informed{false};  ///< Rally: knows the rally point, never shares it
  bool aware{false};     ///< Goal: knows the goal location

  Vec2 velocity() const { return heading_vector(heading) * speed; }
  Circle body() const { return {position, body_radius}; }
};

}  // namespace swarmcomm
