#pragma once
/**
 * @file comm.hpp
 * @brief Communication models: who counts as a neighbor of whom.
 *
 * Three rules are supported:
 *   - metric:      every agent within d_met (inclusive),
 *   - topological: the n_top nearest agents, ties to the lower index,
 *   - visual:      agents in the field of view (+-phi about the heading),
 *                  closer than d_vis (exclusive) and with a clear line of
 *                  sight past every other body and obstacle.
 *
 * Neighbor sets are returned as ascending index vectors. build_graph applies
 * one rule to a whole position snapshot and additionally reports, per agent,
 * whether a special entity (Follow leader or Avoid predator) satisfies the
 * same rule. The special entity occludes and is linkable but never appears
 * in an adjacency list.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "swarmcomm/agent.hpp"
#include "swarmcomm/geometry.hpp"
#include "swarmcomm/world.hpp"

namespace swarmcomm {

struct MetricModel {
  double d_met{30.0};
};
struct TopologicalModel {
  std::size_t n_top{7};
};
struct VisualModel {
  double d_vis{707.1};
  double phi{2.0 * std::numbers::pi / 3.0};
};

using CommModelConfig = std::variant<MetricModel, TopologicalModel, VisualModel>;

inline std::string model_name(const CommModelConfig& m) {
  switch (m.index()) {
    case 0: return "metric";
    case 1: return "topological";
    default: return "visual";
  }
}

inline void validate(const CommModelConfig& m) {
  if (auto* met = std::get_if<MetricModel>(&m); met && !(met->d_met > 0.0))
    throw std::invalid_argument("metric model: d_met must be positive");
  if (auto* top = std::get_if<TopologicalModel>(&m); top && top->n_top < 1)
    throw std::invalid_argument("topological model: n_top must be at least 1");
  if (auto* vis = std::get_if<VisualModel>(&m)) {
    if (!(vis->d_vis > 0.0)) throw std::invalid_argument("visual model: d_vis must be positive");
    if (!(vis->phi > 0.0 && vis->phi <= std::numbers::pi))
      throw std::invalid_argument("visual model: phi must lie in (0, pi]");
  }
}

struct NeighborGraph {
  std::size_t n{0};
  std::vector<std::vector<std::size_t>> adjacency;
  /// Empty when no special entity exists; else 1 where it is linked from agent i.
  std::vector<std::uint8_t> special_links;

  bool has_special() const { return !special_links.empty(); }
  bool special_linked(std::size_t i) const { return has_special() && special_links[i] != 0; }
};

// ---------------------------------------------------------------------------
// Per-agent rules

inline std::vector<std::size_t> metric_neighbors(std::size_t i, std::span<const Vec2> positions, double d_met) {
  std::vector<std::size_t> out;
  const double r2 = d_met * d_met;
  for (std::size_t j = 0; j < positions.size(); ++j)
    if (j != i && distance2(positions[i], positions[j]) <= r2) out.push_back(j);
  return out;
}

inline std::vector<std::size_t> topological_neighbors(std::size_t i, std::span<const Vec2> positions,
                                                      std::size_t n_top) {
  const std::size_t n = positions.size();
  if (n <= 1) return {};
  const std::size_t k = std::min(n_top, n - 1);

  struct Cand {
    double d2;
    std::size_t j;
    bool operator<(const Cand& o) const { return d2 < o.d2 || (d2 == o.d2 && j < o.j); }
  };
  std::vector<Cand> cands;
  cands.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) cands.push_back({distance2(positions[i], positions[j]), j});
  std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k - 1), cands.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t m = 0; m < k; ++m) out.push_back(cands[m].j);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline bool in_field_of_view(const AgentState& viewer, const Vec2& target, double phi) {
  const Vec2 d = target - viewer.position;
  if (d.x == 0.0 && d.y == 0.0) return true;
  return std::abs(wrap_angle(std::atan2(d.y, d.x) - viewer.heading)) <= phi;
}

/// Distance and bearing between every ordered pair of agents in a snapshot.
/// Bearings are computed once per unordered pair; the reverse is offset by pi.
struct PairGeometry {
  std::size_t n{0};
  std::vector<double> dist, bearing;  // row-major n x n

  explicit PairGeometry(std::span<const AgentState> states) : n(states.size()), dist(n * n, 0.0), bearing(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec2 d = states[j].position - states[i].position;
        const double r = d.norm();
        const double a = std::atan2(d.y, d.x);
        dist[i * n + j] = dist[j * n + i] = r;
        bearing[i * n + j] = a;
        bearing[j * n + i] = a > 0.0 ? a - std::numbers::pi : a + std::numbers::pi;
      }
  }
  const double* dist_row(std::size_t i) const { return &dist[i * n]; }
  const double* bearing_row(std::size_t i) const { return &bearing[i * n]; }
};

/// Bodies that may block agent i's view. Each body is filed under the
/// angular bins its silhouette covers, in rough order of nearest surface,
/// so a sight line only tests the bodies filed under its own bearing.
struct OcclusionScene {
  struct Body {
    Vec2 center;
    double radius;
    double near;           // distance from the viewer to the disc surface
    double floor;          // lower bound on near shared by the body's bucket
    std::ptrdiff_t agent;  // swarm index, or -1 for obstacles and specials
  };
  static constexpr std::size_t kBins = 128;
  static constexpr double kBucket = 4.0;

  std::vector<Body> bodies;
  std::vector<std::uint32_t> bin_start;  // CSR offsets into filed, size kBins + 1
  std::vector<std::uint32_t> filed;
  Vec2 eye;

  OcclusionScene() = default;

  /// `dist` and `bearing` optionally hold agent i's row of a PairGeometry.
  OcclusionScene(std::size_t i, std::span<const AgentState> states, std::span<const Circle> extra,
                 const double* dist = nullptr, const double* bearing = nullptr) {
    reset(i, states, extra, dist, bearing);
  }

  /// Rebuilds the scene for viewer i, reusing storage. When `fov` is given
  /// as (heading, phi), only sight lines within that cone are served.
  void reset(std::size_t i, std::span<const AgentState> states, std::span<const Circle> extra,
             const double* dist = nullptr, const double* bearing = nullptr,
             std::optional<std::pair<double, double>> fov = std::nullopt) {
    eye = states[i].position;
    raw_.clear();
    const auto add = [&](const Vec2& c, double r, std::ptrdiff_t agent, double dd, double bb) {
      // A body overlapping the viewer would blind every sight line; it is ignored.
      if (dd < r) return;
      raw_.push_back({{c, r, dd - r, 0.0, agent}, bb, dd});
    };
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (k == i) continue;
      const Vec2 d = states[k].position - eye;
      add(states[k].position, states[k].body_radius, static_cast<std::ptrdiff_t>(k), dist ? dist[k] : d.norm(),
          bearing ? bearing[k] : std::atan2(d.y, d.x));
    }
    for (const auto& c : extra) {
      const Vec2 d = c.center - eye;
      add(c.center, c.radius, -1, d.norm(), std::atan2(d.y, d.x));
    }

    // Counting sort on near / kBucket keeps insertion order within a bucket.
    const std::size_t n = raw_.size();
    key_.resize(n);
    std::uint32_t max_key = 0;
    for (std::size_t k = 0; k < n; ++k) {
      key_[k] = static_cast<std::uint32_t>(raw_[k].body.near / kBucket);
      max_key = std::max(max_key, key_[k]);
    }
    start_.assign(max_key + 2, 0);
    for (auto k : key_) ++start_[k + 1];
    for (std::size_t k = 0; k + 1 < start_.size(); ++k) start_[k + 1] += start_[k];
    order_.resize(n);
    for (std::size_t k = 0; k < n; ++k) order_[start_[key_[k]]++] = static_cast<std::uint32_t>(k);

    std::array<bool, kBins> live;
    live.fill(true);
    if (fov) {
      for (std::size_t b = 0; b < kBins; ++b) {
        const double mid = -std::numbers::pi + (static_cast<double>(b) + 0.5) * kBinWidth;
        live[b] = std::abs(wrap_angle(mid - fov->first)) <= fov->second + kBinWidth;
      }
    }

    bodies.resize(n);
    span_.resize(n);
    bin_start.assign(kBins + 1, 0);
    for (std::size_t m = 0; m < n; ++m) {
      const Raw& r = raw_[order_[m]];
      bodies[m] = r.body;
      bodies[m].floor = static_cast<double>(key_[order_[m]]) * kBucket;
      // x / sqrt(1 - x^2) bounds asin(x) from above and is cheaper.
      const double x = r.dist > 0.0 ? r.body.radius / r.dist : 1.0;
      const double half = x < 0.999 ? std::min(std::numbers::pi / 2, x / std::sqrt(1.0 - x * x)) + 1e-9
                                    : std::numbers::pi / 2 + 1e-9;
      std::ptrdiff_t lo = raw_bin(r.bearing - half);
      std::ptrdiff_t hi = raw_bin(r.bearing + half);
      if (hi - lo + 1 >= static_cast<std::ptrdiff_t>(kBins)) lo = 0, hi = kBins - 1;
      span_[m] = {lo, hi};
      for (std::ptrdiff_t b = lo; b <= hi; ++b)
        if (live[wrap(b)]) ++bin_start[wrap(b) + 1];
    }
    for (std::size_t b = 0; b < kBins; ++b) bin_start[b + 1] += bin_start[b];
    filed.resize(bin_start[kBins]);
    std::array<std::uint32_t, kBins> fill;
    std::copy(bin_start.begin(), bin_start.end() - 1, fill.begin());
    for (std::size_t m = 0; m < n; ++m)
      for (std::ptrdiff_t b = span_[m].first; b <= span_[m].second; ++b)
        if (live[wrap(b)]) filed[fill[wrap(b)]++] = static_cast<std::uint32_t>(m);
  }

  /// Line of sight to `target`, ignoring the body of agent `skip_agent`
  /// (pass -1 to ignore none), any body overlapping the target and, when
  /// `target_is_extra`, the non-swarm body centered exactly on target.
  bool clear_to(const Vec2& target, std::ptrdiff_t skip_agent, bool target_is_extra) const {
    const Vec2 d = target - eye;
    return clear_to(target, std::atan2(d.y, d.x), skip_agent, target_is_extra);
  }

  /// As above with the bearing from the viewer to `target` precomputed.
  bool clear_to(const Vec2& target, double bearing, std::ptrdiff_t skip_agent, bool target_is_extra) const {
    if (target == eye) return true;
    const double reach = distance(eye, target) + 1e-9;
    const std::size_t b = wrap(raw_bin(bearing));
    for (std::uint32_t m = bin_start[b]; m < bin_start[b + 1]; ++m) {
      const Body& body = bodies[filed[m]];
      if (body.floor >= reach) break;
      if (body.near >= reach) continue;
      if (body.agent >= 0 && body.agent == skip_agent) continue;
      if (target_is_extra && body.agent < 0 && body.center == target) continue;
      if (distance2(body.center, target) < body.radius * body.radius) continue;
      if (disc_blocks_segment(eye, target, body.center, body.radius)) return false;
    }
    return true;
  }

 private:
  struct Raw {
    Body body;
    double bearing, dist;
  };
  std::vector<Raw> raw_;
  std::vector<std::uint32_t> key_, start_, order_;
  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> span_;

  static constexpr double kBinWidth = 2.0 * std::numbers::pi / static_cast<double>(kBins);

  /// Unwrapped bin index of an angle; wrap() folds it into [0, kBins).
  static std::ptrdiff_t raw_bin(double angle) {
    return static_cast<std::ptrdiff_t>(std::floor((angle + std::numbers::pi) / kBinWidth));
  }
  static std::size_t wrap(std::ptrdiff_t b) {
    static_assert((kBins & (kBins - 1)) == 0);
    return static_cast<std::size_t>(b) & (kBins - 1);
  }
};

inline std::vector<std::size_t> visual_row(std::size_t i, std::span<const AgentState> states, const VisualModel& cfg,
                                           const OcclusionScene& scene, const double* dist = nullptr,
                                           const double* bearing = nullptr) {
  std::vector<std::size_t> out;
  const AgentState& me = states[i];
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (j == i) continue;
    const Vec2& p = states[j].position;
    const Vec2 d = p - me.position;
    if (!((dist ? dist[j] : d.norm()) < cfg.d_vis)) continue;
    if (d.x == 0.0 && d.y == 0.0) {
      out.push_back(j);
      continue;
    }
    const double a = bearing ? bearing[j] : std::atan2(d.y, d.x);
    if (std::abs(wrap_angle(a - me.heading)) > cfg.phi) continue;
    if (scene.clear_to(p, a, static_cast<std::ptrdiff_t>(j), false)) out.push_back(j);
  }
  return out;
}

}  // namespace detail

/// Visual neighbors of agent i.
///
/// `occluders` holds the non-swarm bodies (obstacles, leader or predator).
/// Swarm bodies are taken from `states`; for each candidate j the occluding
/// set is every body except those of i and j and any body overlapping either
/// position.
inline std::vector<std::size_t> visual_neighbors(std::size_t i, std::span<const AgentState> states,
                                                 const VisualModel& cfg, std::span<const Circle> occluders) {
  if (states.size() <= 1) return {};
  return detail::visual_row(i, states, cfg, detail::OcclusionScene(i, states, occluders));
}

// ---------------------------------------------------------------------------
// Whole-snapshot graph

namespace detail {

inline bool special_visible(const CommModelConfig& model, std::size_t i, std::span<const AgentState> states,
                            std::span<const Vec2> positions, const AgentState& special,
                            const detail::OcclusionScene* scene) {
  const Vec2& pi = positions[i];
  const double d2 = distance2(pi, special.position);
  if (auto* met = std::get_if<MetricModel>(&model)) return d2 <= met->d_met * met->d_met;
  if (auto* top = std::get_if<TopologicalModel>(&model)) {
    // The special entity ranks among the other agents and loses ties.
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < positions.size(); ++j)
      if (j != i && distance2(pi, positions[j]) <= d2) ++ahead;
    return ahead < top->n_top;
  }
  const auto& vis = std::get<VisualModel>(model);
  if (!(std::sqrt(d2) < vis.d_vis)) return false;
  if (!in_field_of_view(states[i], special.position, vis.phi)) return false;
  return scene->clear_to(special.position, -1, true);
}

}  // namespace detail

inline NeighborGraph build_graph(const CommModelConfig& model, std::span<const AgentState> states,
                                 const WorldConfig& world, const std::optional<AgentState>& special = std::nullopt) {
  NeighborGraph g;
  g.n = states.size();
  g.adjacency.assign(g.n, {});
  if (special) g.special_links.assign(g.n, 0);

  std::vector<Vec2> positions(g.n);
  for (std::size_t i = 0; i < g.n; ++i) positions[i] = states[i].position;

  if (auto* met = std::get_if<MetricModel>(&model)) {
    const double r2 = met->d_met * met->d_met;
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = i + 1; j < g.n; ++j)
        if (distance2(positions[i], positions[j]) <= r2) {
          g.adjacency[i].push_back(j);
          g.adjacency[j].push_back(i);
        }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  } else if (auto* top = std::get_if<TopologicalModel>(&model)) {
    for (std::size_t i = 0; i < g.n; ++i) g.adjacency[i] = topological_neighbors(i, positions, top->n_top);
  }

  std::vector<Circle> extra = world.obstacles;
  if (special) extra.push_back(special->body());
  const auto* vis = std::get_if<VisualModel>(&model);

  std::optional<detail::PairGeometry> pairs;
  if (vis) pairs.emplace(states);
  detail::OcclusionScene scene;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (vis) {
      scene.reset(i, states, extra, pairs->dist_row(i), pairs->bearing_row(i),
                  std::pair{states[i].heading, vis->phi});
      g.adjacency[i] = detail::visual_row(i, states, *vis, scene, pairs->dist_row(i), pairs->bearing_row(i));
    }
    if (special)
      g.special_links[i] = detail::special_visible(model, i, states, positions, *special, vis ? &scene : nullptr);
  }
  return g;
}

}  // namespace swarmcomm
