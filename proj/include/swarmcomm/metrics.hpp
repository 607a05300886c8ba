#pragma once
/**
 * @file metrics.hpp
 * @brief Graph measures and the per-trial performance record.
 *
 * Directed links from the topological and visual models are symmetrized
 * before any structural measure. The leader and predator are not vertices.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmcomm/agent.hpp"
#include "swarmcomm/comm.hpp"
#include "swarmcomm/tasks.hpp"

namespace swarmcomm {

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns true when the call merged two distinct sets.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

inline std::size_t connected_components(const NeighborGraph& g) {
  UnionFind uf(g.n);
  std::size_t merges = 0;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j : g.adjacency[i]) merges += uf.unite(i, j) ? 1 : 0;
  return g.n - merges;
}

/// Mean local clustering over all agents; agents with fewer than two
/// neighbors contribute 0. Zero for an empty graph.
inline double clustering_coefficient(const NeighborGraph& g) {
  if (g.n == 0) return 0.0;
  // Symmetrized adjacency as bit rows; edges among i's neighbors are counted
  // with one AND + popcount per neighbor.
  const std::size_t words = (g.n + 63) / 64;
  std::vector<std::uint64_t> bits(g.n * words, 0);
  const auto set = [&](std::size_t a, std::size_t b) { bits[a * words + b / 64] |= std::uint64_t{1} << (b % 64); };
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j : g.adjacency[i]) {
      set(i, j);
      set(j, i);
    }
  double total = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const std::uint64_t* row = &bits[i * words];
    std::size_t k = 0;
    for (std::size_t w = 0; w < words; ++w) k += static_cast<std::size_t>(std::popcount(row[w]));
    if (k < 2) continue;
    std::size_t twice_closed = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t m = row[w];
      while (m) {
        const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(m));
        m &= m - 1;
        const std::uint64_t* rv = &bits[v * words];
        for (std::size_t x = 0; x < words; ++x) twice_closed += static_cast<std::size_t>(std::popcount(rv[x] & row[x]));
      }
    }
    total += static_cast<double>(twice_closed) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  return total / static_cast<double>(g.n);
}

/// Percentage of agents with an empty symmetrized neighborhood.
inline double isolated_percent(const NeighborGraph& g) {
  if (g.n == 0) return 0.0;
  std::vector<std::uint8_t> linked(g.n, 0);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j : g.adjacency[i]) linked[i] = linked[j] = 1;
  const auto isolated = std::count(linked.begin(), linked.end(), std::uint8_t{0});
  return 100.0 * static_cast<double>(isolated) / static_cast<double>(g.n);
}

/// Mean distance over all unordered agent pairs (0 for fewer than two agents).
inline double mean_pairwise_distance(std::span<const AgentState> states) {
  const std::size_t n = states.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += distance(states[i].position, states[j].position);
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

struct MetricsRecord {
  std::optional<double> PF, NCC, PR, L, SCC, D, I, DINF, INF, ASTK, SSTK;
};

/// Metric names in results-file column order.
inline constexpr const char* kMetricNames[] = {"PF", "NCC", "PR", "L", "SCC", "D", "I", "DINF", "INF", "ASTK", "SSTK"};

namespace detail {

template <typename Record>
auto metric_slot(Record& r, const std::string& name) -> decltype(&r.PF) {
  decltype(&r.PF) slots[] = {&r.PF, &r.NCC, &r.PR, &r.L, &r.SCC, &r.D, &r.I, &r.DINF, &r.INF, &r.ASTK, &r.SSTK};
  for (std::size_t k = 0; k < std::size(kMetricNames); ++k)
    if (name == kMetricNames[k]) return slots[k];
  return nullptr;
}

}  // namespace detail

inline std::optional<double>* metric_slot(MetricsRecord& r, const std::string& name) {
  return detail::metric_slot(r, name);
}

inline std::optional<double> metric_value(const MetricsRecord& r, const std::string& name) {
  const auto* slot = detail::metric_slot(r, name);
  return slot ? *slot : std::nullopt;
}

/// Which metrics each task records.
struct MetricMask {
  bool PF, NCC, PR, L, SCC, D, I, DINF, INF, ASTK, SSTK;
};

inline MetricMask recorded_metrics(TaskKind k) {
  //        PF     NCC    PR     L      SCC   D     I     DINF   INF    ASTK   SSTK
  switch (k) {
    case TaskKind::Targets: return {true, true, false, false, true, true, true, false, false, false, false};
    case TaskKind::Goal: return {false, false, true, true, true, true, true, false, false, false, false};
    case TaskKind::Rally: return {false, true, true, false, true, true, true, true, false, false, false};
    case TaskKind::Disperse: return {false, true, false, false, true, true, true, false, false, false, false};
    case TaskKind::Avoid: return {false, true, false, false, true, true, true, false, false, false, false};
    case TaskKind::Follow: return {false, true, false, false, true, true, true, false, true, true, true};
  }
  return {};
}

/// Per-iteration samples plus start/end summaries of one trial.
struct TrialHistory {
  std::size_t iterations{0};  ///< T
  std::vector<double> components;
  std::vector<double> clustering;
  std::vector<double> isolated;
  double start_mean_distance{0.0};
  double end_mean_distance{0.0};

  void record(const NeighborGraph& g) {
    components.push_back(static_cast<double>(connected_components(g)));
    clustering.push_back(clustering_coefficient(g));
    isolated.push_back(isolated_percent(g));
  }
};

namespace detail {

inline std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

struct MetricsOutcome {
  MetricsRecord record;
  std::vector<std::string> diagnostics;
};

inline MetricsOutcome trial_metrics(const TrialHistory& h, const TaskState& ts, const TaskSpec& task,
                                    std::size_t n_agents) {
  MetricsOutcome out;
  MetricsRecord& r = out.record;
  const MetricMask m = recorded_metrics(task_kind(task));
  const double n = static_cast<double>(n_agents);
  const double T = static_cast<double>(h.iterations);

  if (m.PF) {
    if (ts.targets.empty()) {
      out.diagnostics.push_back("PF undefined: no targets");
    } else {
      const auto found = std::count_if(ts.targets.begin(), ts.targets.end(), [](const Target& t) { return t.discovered; });
      r.PF = 100.0 * static_cast<double>(found) / static_cast<double>(ts.targets.size());
    }
  }
  if (m.NCC) r.NCC = detail::mean_of(h.components);
  if (m.SCC) r.SCC = detail::mean_of(h.clustering);
  if (m.I) r.I = detail::mean_of(h.isolated);
  if (m.PR && n_agents > 0)
    r.PR = 100.0 * static_cast<double>(std::count(ts.reached.begin(), ts.reached.end(), std::uint8_t{1})) / n;
  if (m.L) {
    if (ts.first_aware_iter && ts.all_aware_iter)
      r.L = static_cast<double>(*ts.all_aware_iter - *ts.first_aware_iter);
    else
      r.L = T;
  }
  if (m.D) {
    if (h.start_mean_distance > 0.0)
      r.D = 100.0 * (h.end_mean_distance - h.start_mean_distance) / h.start_mean_distance;
    else
      out.diagnostics.push_back("D undefined: zero initial mean distance");
  }
  if (m.DINF) {
    if (ts.uninformed == 0) {
      out.diagnostics.push_back("DINF undefined: no uninformed agents");
    } else if (!ts.influenced_counts.empty()) {
      double sum = 0.0;
      for (auto c : ts.influenced_counts) sum += static_cast<double>(c) / static_cast<double>(ts.uninformed);
      r.DINF = sum / static_cast<double>(ts.influenced_counts.size());
    } else {
      r.DINF = 0.0;
    }
  }
  if (m.INF && n_agents > 0)
    r.INF = static_cast<double>(std::count(ts.ever_connected.begin(), ts.ever_connected.end(), std::uint8_t{1})) / n;
  if (m.ASTK && n_agents > 0)
    r.ASTK = static_cast<double>(std::accumulate(ts.follow_count.begin(), ts.follow_count.end(), std::size_t{0})) / n;
  if (m.SSTK) r.SSTK = static_cast<double>(ts.swarm_follow_iters);
  return out;
}

}  // namespace swarmcomm
