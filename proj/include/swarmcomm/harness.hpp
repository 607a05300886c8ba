#pragma once
/**
 * @file harness.hpp
 * @brief Factorial designs, seeded trial execution and sweep persistence.
 *
 * A DesignSpec enumerates TrialConfigs as the Cartesian product
 *
 *     model x N x task factor 1 x task factor 2 x r_r x r_o mult x r_a mult x replicate
 *
 * in that nesting order (replicate fastest). Trial k of a design gets the seed
 * trial_seed(base_seed, k) = mix64(base_seed ^ mix64(k)), so any trial can be
 * rerun alone. run_sweep writes results rows in trial_index order no matter
 * how many workers run or in which order they finish.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "swarmcomm/comm.hpp"
#include "swarmcomm/dynamics.hpp"
#include "swarmcomm/metrics.hpp"
#include "swarmcomm/rng.hpp"
#include "swarmcomm/tasks.hpp"
#include "swarmcomm/world.hpp"

namespace swarmcomm {

/// Simulation constants shared by every trial of a design.
struct SimParams {
  double world_width{1000.0};
  double world_height{1000.0};
  double wall_margin{20.0};
  double steer_offset{std::numbers::pi / 4.0};
  double obstacle_radius{kObstacleRadius};
  double speed{2.0};
  double max_turn{0.3};
  double body_radius{5.0};
  ForceWeights weights;
  double phi{2.0 * std::numbers::pi / 3.0};
  std::optional<double> d_vis;  ///< half the world diagonal when unset
  double omega{0.5};
  double leader_sigma{0.15};

  WorldConfig world() const {
    WorldConfig w;
    w.width = world_width;
    w.height = world_height;
    w.wall_margin = wall_margin;
    w.steer_offset = steer_offset;
    return w;
  }
};

enum class ModelKind { Metric, Topological, Visual };

inline std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Metric: return "metric";
    case ModelKind::Topological: return "topological";
    case ModelKind::Visual: return "visual";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(const std::string& s) {
  if (s == "metric") return ModelKind::Metric;
  if (s == "topological") return ModelKind::Topological;
  if (s == "visual") return ModelKind::Visual;
  return std::nullopt;
}

struct ModelLevel {
  ModelKind kind{ModelKind::Metric};
  std::size_t n_top{7};
};

/// d_met = r_a; d_vis = half the world diagonal unless overridden.
inline CommModelConfig resolve_model(const ModelLevel& m, const RadiiConfig& radii, const SimParams& sim) {
  switch (m.kind) {
    case ModelKind::Metric: return MetricModel{radii.r_a};
    case ModelKind::Topological: return TopologicalModel{m.n_top};
    case ModelKind::Visual:
      return VisualModel{sim.d_vis.value_or(0.5 * std::hypot(sim.world_width, sim.world_height)), sim.phi};
  }
  return MetricModel{radii.r_a};
}

inline std::size_t default_iterations(TaskKind k) {
  switch (k) {
    case TaskKind::Targets: return 1000;
    case TaskKind::Goal: return 1000;
    case TaskKind::Rally: return 750;
    case TaskKind::Disperse: return 200;
    case TaskKind::Avoid: return 200;
    case TaskKind::Follow: return 2000;
  }
  return 1000;
}

/// Number of task-specific factors (0, 1 or 2) and their column meaning.
inline std::size_t task_factor_count(TaskKind k) {
  switch (k) {
    case TaskKind::Targets: return 2;  // N_o, N_t
    case TaskKind::Goal: return 1;     // N_o
    case TaskKind::Rally: return 2;    // p_i, g
    case TaskKind::Disperse: return 2; // N_o, s
    default: return 0;
  }
}

inline TaskSpec make_task(TaskKind k, double f1, double f2, const SimParams& sim) {
  const auto count = [](double v) { return static_cast<std::size_t>(std::llround(v)); };
  switch (k) {
    case TaskKind::Targets: return TargetsTask{count(f2), count(f1)};
    case TaskKind::Goal: return GoalTask{count(f1), std::nullopt, sim.omega};
    case TaskKind::Rally: return RallyTask{f1, count(f2), std::nullopt, sim.omega};
    case TaskKind::Disperse: return DisperseTask{count(f1), f2, std::nullopt};
    case TaskKind::Avoid: return AvoidTask{};
    case TaskKind::Follow: return FollowTask{WalkSpec{sim.leader_sigma, std::nullopt}};
  }
  return TargetsTask{};
}

struct TrialConfig {
  TaskSpec task;
  ModelLevel model;
  std::size_t n_agents{50};
  RadiiConfig radii;
  std::size_t iterations{1000};
  std::uint64_t seed{0};
  std::size_t trial_index{0};
  std::optional<double> factor1, factor2;  ///< echoed into the results row
  SimParams sim;
};

struct TrialDiagnostics {
  std::size_t overshoots{0};
  std::size_t coincident_pairs{0};
  double wall_clock_seconds{0.0};  ///< not written to results files
  std::vector<std::string> notes;
};

struct TrialResult {
  TrialConfig config;
  MetricsRecord metrics;
  bool aborted{false};
  std::string abort_reason;
  TrialDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Designs

struct DesignSpec {
  TaskKind task{TaskKind::Targets};
  std::vector<ModelLevel> models;
  std::vector<std::size_t> n_levels;
  std::vector<double> r_r_levels;
  std::vector<double> r_o_mult;
  std::vector<double> r_a_mult;
  std::vector<double> factor1;  ///< ignored for tasks without a first factor
  std::vector<double> factor2;  ///< ignored for tasks without a second factor
  std::size_t replicates{25};
  double scale{1.0};  ///< replicates actually run: max(1, round(replicates * scale))
  std::uint64_t base_seed{1};
  std::optional<std::size_t> iterations;
  SimParams sim;

  std::size_t effective_replicates() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(replicates) * scale)));
  }
};

/// Full factorial design for one task: metric, visual and topological with
/// n_top in {5, 6, 7, 8}; N in {50, 100, 200}; the eight radii layouts;
/// three levels per task factor; 25 replicates.
inline DesignSpec full_design(TaskKind task) {
  DesignSpec d;
  d.task = task;
  d.models = {{ModelKind::Metric, 7},      {ModelKind::Visual, 7},      {ModelKind::Topological, 5},
              {ModelKind::Topological, 6}, {ModelKind::Topological, 7}, {ModelKind::Topological, 8}};
  d.n_levels = {50, 100, 200};
  d.r_r_levels = {10.0, 20.0};
  d.r_o_mult = {1.5, 2.0};
  d.r_a_mult = {1.5, 2.0};
  switch (task) {
    case TaskKind::Targets: d.factor1 = {0, 5, 10}; d.factor2 = {4, 8, 16}; break;
    case TaskKind::Goal: d.factor1 = {0, 5, 10}; break;
    case TaskKind::Rally: d.factor1 = {0.08, 0.16, 0.24}; d.factor2 = {1, 2, 4}; break;
    case TaskKind::Disperse: d.factor1 = {0, 5, 10}; d.factor2 = {0.45, 0.90, 1.35}; break;
    default: break;
  }
  return d;
}

/// Reduced design: three models (n_top = 7), N in {50, 100}, all eight radii
/// layouts, the middle level of each task factor, 10 replicates.
inline DesignSpec desk_design(TaskKind task) {
  DesignSpec d = full_design(task);
  d.models = {{ModelKind::Metric, 7}, {ModelKind::Topological, 7}, {ModelKind::Visual, 7}};
  d.n_levels = {50, 100};
  if (!d.factor1.empty()) d.factor1 = {d.factor1[1]};
  if (!d.factor2.empty()) d.factor2 = {d.factor2[1]};
  d.replicates = 10;
  return d;
}

inline std::vector<TrialConfig> enumerate_design(const DesignSpec& spec) {
  const std::size_t nf = task_factor_count(spec.task);
  if (spec.models.empty() || spec.n_levels.empty() || spec.r_r_levels.empty() || spec.r_o_mult.empty() ||
      spec.r_a_mult.empty() || spec.replicates == 0 || (nf >= 1 && spec.factor1.empty()) ||
      (nf >= 2 && spec.factor2.empty()))
    throw std::invalid_argument("enumerate_design: empty factor grid");
  if (!(spec.scale > 0.0)) throw std::invalid_argument("enumerate_design: scale must be positive");

  const std::vector<std::optional<double>> none{std::nullopt};
  const auto levels = [&](const std::vector<double>& v, bool used) {
    if (!used) return none;
    std::vector<std::optional<double>> out(v.begin(), v.end());
    return out;
  };
  const auto f1 = levels(spec.factor1, nf >= 1);
  const auto f2 = levels(spec.factor2, nf >= 2);
  const std::size_t reps = spec.effective_replicates();
  const std::size_t T = spec.iterations.value_or(default_iterations(spec.task));

  std::vector<TrialConfig> out;
  for (const auto& model : spec.models)
    for (std::size_t n : spec.n_levels)
      for (const auto& a : f1)
        for (const auto& b : f2)
          for (double rr : spec.r_r_levels)
            for (double om : spec.r_o_mult)
              for (double am : spec.r_a_mult)
                for (std::size_t rep = 0; rep < reps; ++rep) {
                  TrialConfig c;
                  c.task = make_task(spec.task, a.value_or(0.0), b.value_or(0.0), spec.sim);
                  c.model = model;
                  c.n_agents = n;
                  c.radii = {rr, rr * om, rr * om * am};
                  c.iterations = T;
                  c.trial_index = out.size();
                  c.seed = trial_seed(spec.base_seed, c.trial_index);
                  c.factor1 = a;
                  c.factor2 = b;
                  c.sim = spec.sim;
                  out.push_back(std::move(c));
                }
  return out;
}

// ---------------------------------------------------------------------------
// Trace output

/// Per-iteration agent rows plus task-event rows (agent_id = -1).
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& os) : os_(os) { os_ << "t,agent_id,x,y,heading,aware,informed,n_neighbors,event\n"; }

  void agents(std::size_t t, std::span<const AgentState> states, const NeighborGraph& g) {
    char buf[160];
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& a = states[i];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.4f,%.4f,%.6f,%d,%d,%zu,\n", t, i, a.position.x, a.position.y,
                    a.heading, a.aware ? 1 : 0, a.informed ? 1 : 0, g.adjacency[i].size());
      os_ << buf;
    }
  }

  void event(std::size_t t, const Vec2& where, const std::string& tag) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,-1,%.4f,%.4f,,,,,%s\n", t, where.x, where.y, tag.c_str());
    os_ << buf;
  }

 private:
  std::ostream& os_;
};

// ---------------------------------------------------------------------------
// Trial execution

namespace detail {

inline void trace_events(TraceWriter& tw, std::size_t t, const TaskState& before, const TaskState& after,
                         std::span<const AgentState> states) {
  for (std::size_t k = 0; k < after.targets.size(); ++k)
    if (after.targets[k].discovered && !before.targets[k].discovered)
      tw.event(t, after.targets[k].position, "target_discovered:" + std::to_string(k));
  if (after.first_aware_iter && !before.first_aware_iter) tw.event(t, after.attractor.value_or(Vec2{}), "first_aware");
  if (after.all_aware_iter && !before.all_aware_iter) tw.event(t, after.attractor.value_or(Vec2{}), "all_aware");
  if (after.leader) tw.event(t, after.leader->position, "leader");
  if (after.predator) tw.event(t, after.predator->position, "predator");
  (void)states;
}

}  // namespace detail

inline TrialResult run_trial(const TrialConfig& cfg, std::ostream* trace = nullptr) {
  const auto started = std::chrono::steady_clock::now();
  TrialResult result;
  result.config = cfg;

  cfg.radii.validate();
  const SimParams& sim = cfg.sim;
  WorldConfig world = sim.world();
  Rng rng(cfg.seed);

  TrialSetup setup{cfg.n_agents, cfg.radii, sim.speed, sim.body_radius, sim.obstacle_radius};
  TrialInit init;
  try {
    init = init_trial(cfg.task, setup, world, rng);
  } catch (const PlacementError& e) {
    result.aborted = true;
    result.abort_reason = e.what();
    return result;
  }
  world.validate();
  std::vector<AgentState>& states = init.states;
  TaskState& ts = init.task_state;

  const CommModelConfig model = resolve_model(cfg.model, cfg.radii, sim);
  validate(model);

  std::optional<TraceWriter> tw;
  if (trace) tw.emplace(*trace);

  TrialHistory history;
  history.iterations = cfg.iterations;
  history.start_mean_distance = mean_pairwise_distance(states);

  NeighborGraph graph = build_graph(model, states, world, ts.special());
  {
    const TaskState before = ts;
    update_task_state(cfg.task, graph, states, ts, 0);
    if (tw) {
      tw->agents(0, states, graph);
      detail::trace_events(*tw, 0, before, ts, states);
    }
  }

  std::vector<ForceBreakdown> forces(states.size());
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const JitterKey jitter{cfg.seed, t};
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!in_bounds(states[i].position, world)) {
        ++result.diagnostics.overshoots;
        states[i].position = clamp_to_world(states[i].position, world);
      }
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
      const TaskForce tf = task_force(cfg.task, i, graph, states, ts, cfg.radii);
      forces[i] = total_force(i, world, graph, states, tf, cfg.radii, sim.weights, jitter);
      result.diagnostics.coincident_pairs += forces[i].coincident;
    }
    states = step(states, forces, world, sim.max_turn);
    advance_task_entities(cfg.task, ts, world, rng);
    graph = build_graph(model, states, world, ts.special());

    const std::optional<TaskState> before = tw ? std::optional<TaskState>(ts) : std::nullopt;
    update_task_state(cfg.task, graph, states, ts, t);
    history.record(graph);
    if (tw) {
      tw->agents(t, states, graph);
      detail::trace_events(*tw, t, *before, ts, states);
    }
  }
  if (cfg.iterations == 0) history.record(graph);
  history.end_mean_distance = mean_pairwise_distance(states);

  MetricsOutcome m = trial_metrics(history, ts, cfg.task, cfg.n_agents);
  result.metrics = m.record;
  result.diagnostics.notes = std::move(m.diagnostics);
  result.diagnostics.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

// ---------------------------------------------------------------------------
// Results files

inline constexpr const char* kResultsHeader =
    "task,model,n_top,N,r_r,r_o,r_a,task_factor_1,task_factor_2,trial_index,seed,"
    "PF,NCC,PR,L,SCC,D,I,DINF,INF,ASTK,SSTK,status,diagnostics";

namespace detail {

inline std::string fmt_num(double v, const char* f = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v, const char* f = "%.6f") { return v ? fmt_num(*v, f) : ""; }

}  // namespace detail

/// One results row, without trailing newline. Wall-clock time is left out so
/// rows are reproducible byte for byte.
inline std::string results_row(const TrialResult& r) {
  const TrialConfig& c = r.config;
  std::ostringstream os;
  os << task_name(task_kind(c.task)) << ',' << model_kind_name(c.model.kind) << ',';
  if (c.model.kind == ModelKind::Topological) os << c.model.n_top;
  os << ',' << c.n_agents << ',' << detail::fmt_num(c.radii.r_r, "%g") << ',' << detail::fmt_num(c.radii.r_o, "%g")
     << ',' << detail::fmt_num(c.radii.r_a, "%g") << ',' << detail::fmt_opt(c.factor1, "%g") << ','
     << detail::fmt_opt(c.factor2, "%g") << ',' << c.trial_index << ',' << c.seed;
  for (const char* name : kMetricNames) os << ',' << detail::fmt_opt(metric_value(r.metrics, name));
  os << ',' << (r.aborted ? "aborted" : "ok") << ',';
  std::string diag = "overshoot=" + std::to_string(r.diagnostics.overshoots) +
                     ";coincident=" + std::to_string(r.diagnostics.coincident_pairs);
  if (r.aborted) diag += ";abort=" + r.abort_reason;
  for (const auto& note : r.diagnostics.notes) diag += ";" + note;
  std::replace(diag.begin(), diag.end(), ',', ' ');
  os << diag;
  return os.str();
}

/// Runs `configs` on `workers` threads and hands each result to `sink` in
/// trial_index order (the sink is only ever called from one thread at a time).
inline void run_trials(const std::vector<TrialConfig>& configs, std::size_t workers,
                       const std::function<void(const TrialResult&)>& sink) {
  workers = std::max<std::size_t>(1, std::min(workers, configs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::map<std::size_t, TrialResult> pending;
  std::size_t emit = 0;
  std::exception_ptr failure;

  const auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= configs.size()) return;
      TrialResult r;
      try {
        r = run_trial(configs[k]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = configs.size();
        return;
      }
      std::lock_guard lock(mu);
      if (failure) return;
      pending.emplace(k, std::move(r));
      try {
        while (!pending.empty() && pending.begin()->first == emit) {
          sink(pending.begin()->second);
          pending.erase(pending.begin());
          ++emit;
        }
      } catch (...) {
        failure = std::current_exception();
        next = configs.size();
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct SweepSummary {
  std::size_t trials{0};
  std::size_t aborted{0};
  double seconds{0.0};
};

/// Error raised while persisting a sweep; carries the failing trial index.
struct SweepIoError : std::runtime_error {
  std::size_t trial_index;
  SweepIoError(const std::string& what, std::size_t index) : std::runtime_error(what), trial_index(index) {}
};

inline SweepSummary run_sweep(const DesignSpec& spec, std::size_t workers, std::ostream& out,
                              std::vector<TrialResult>* keep = nullptr) {
  const auto configs = enumerate_design(spec);
  const auto started = std::chrono::steady_clock::now();
  SweepSummary s;
  out << kResultsHeader << '\n';
  if (!out) throw SweepIoError("results stream not writable", 0);
  run_trials(configs, workers, [&](const TrialResult& r) {
    out << results_row(r) << '\n';
    if (!out) throw SweepIoError("write failed at trial " + std::to_string(r.config.trial_index), r.config.trial_index);
    ++s.trials;
    if (r.aborted) ++s.aborted;
    if (keep) keep->push_back(r);
  });
  out.flush();
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return s;
}

inline SweepSummary run_sweep(const DesignSpec& spec, std::size_t workers, const std::string& path,
                              std::vector<TrialResult>* keep = nullptr) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SweepIoError("cannot open results file: " + path, 0);
  return run_sweep(spec, workers, f, keep);
}

}  // namespace swarmcomm
