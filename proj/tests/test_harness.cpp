#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "swarmcomm/harness.hpp"

using namespace swarmcomm;

namespace {

// A small, fast design: desk grid, one replicate, short trials.
DesignSpec quick_design(TaskKind task, std::size_t iterations = 15) {
  DesignSpec d = desk_design(task);
  d.replicates = 1;
  d.iterations = iterations;
  d.base_seed = 99;
  return d;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::string sweep_csv(const DesignSpec& d, std::size_t workers) {
  std::ostringstream os;
  run_sweep(d, workers, os);
  return os.str();
}

}  // namespace

TEST(EnumerateDesign, FullTotals) {
  const std::pair<TaskKind, std::size_t> totals[] = {{TaskKind::Targets, 32400}, {TaskKind::Goal, 10800},
                                                     {TaskKind::Rally, 32400},   {TaskKind::Disperse, 32400},
                                                     {TaskKind::Avoid, 3600},    {TaskKind::Follow, 3600}};
  for (auto [task, n] : totals) EXPECT_EQ(enumerate_design(full_design(task)).size(), n) << task_name(task);
}

TEST(EnumerateDesign, ScaleAndSingleTrial) {
  DesignSpec d = full_design(TaskKind::Targets);
  d.scale = 0.04;
  EXPECT_EQ(enumerate_design(d).size(), 1296u);

  DesignSpec one = full_design(TaskKind::Rally);
  one.models = {{ModelKind::Visual, 7}};
  one.n_levels = {50};
  one.r_r_levels = {10};
  one.r_o_mult = {1.5};
  one.r_a_mult = {2.0};
  one.factor1 = {0.16};
  one.factor2 = {2};
  one.replicates = 1;
  const auto c = enumerate_design(one);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c[0].radii.r_a, 30.0);
  EXPECT_EQ(std::get<RallyTask>(c[0].task).groups, 2u);
}

TEST(EnumerateDesign, EmptyGridThrows) {
  DesignSpec d = full_design(TaskKind::Goal);
  d.n_levels.clear();
  EXPECT_THROW(enumerate_design(d), std::invalid_argument);
  DesignSpec e = full_design(TaskKind::Goal);
  e.factor1.clear();
  EXPECT_THROW(enumerate_design(e), std::invalid_argument);
}

TEST(EnumerateDesign, RadiiLayoutsAndSeeds) {
  const auto c = enumerate_design(full_design(TaskKind::Avoid));
  std::set<std::tuple<double, double, double>> layouts;
  std::set<std::uint64_t> seeds;
  for (const auto& t : c) {
    layouts.insert({t.radii.r_r, t.radii.r_o, t.radii.r_a});
    seeds.insert(t.seed);
    EXPECT_EQ(t.seed, trial_seed(1, t.trial_index));
    EXPECT_EQ(t.iterations, 200u);
  }
  EXPECT_EQ(layouts.size(), 8u);
  EXPECT_EQ(seeds.size(), c.size());
  const auto again = enumerate_design(full_design(TaskKind::Avoid));
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(again[k].seed, c[k].seed);
}

TEST(RunTrial, ReplayIsByteIdentical) {
  for (TaskKind task : {TaskKind::Goal, TaskKind::Follow, TaskKind::Avoid}) {
    auto cfg = enumerate_design(quick_design(task, 30)).back();  // visual model, N = 100
    std::ostringstream t1, t2;
    const auto a = run_trial(cfg, &t1);
    const auto b = run_trial(cfg, &t2);
    EXPECT_EQ(results_row(a), results_row(b));
    EXPECT_EQ(t1.str(), t2.str());
    EXPECT_FALSE(t1.str().empty());
  }
}

TEST(RunTrial, ZeroIterations) {
  auto cfg = enumerate_design(quick_design(TaskKind::Goal, 0)).front();
  const auto r = run_trial(cfg);
  EXPECT_FALSE(r.aborted);
  EXPECT_DOUBLE_EQ(*r.metrics.D, 0.0);
  EXPECT_DOUBLE_EQ(*r.metrics.L, 0.0);
}

TEST(RunTrial, RangesHold) {
  for (TaskKind task : {TaskKind::Targets, TaskKind::Goal, TaskKind::Rally, TaskKind::Disperse, TaskKind::Avoid,
                        TaskKind::Follow}) {
    const auto configs = enumerate_design(quick_design(task, 40));
    for (std::size_t k = 0; k < configs.size(); k += 7) {
      const auto r = run_trial(configs[k]);
      ASSERT_FALSE(r.aborted) << r.abort_reason;
      const auto& m = r.metrics;
      const double n = static_cast<double>(configs[k].n_agents);
      if (m.PF) { EXPECT_TRUE(*m.PF >= 0 && *m.PF <= 100); }
      if (m.PR) { EXPECT_TRUE(*m.PR >= 0 && *m.PR <= 100); }
      if (m.I) { EXPECT_TRUE(*m.I >= 0 && *m.I <= 100); }
      if (m.NCC) { EXPECT_TRUE(*m.NCC >= 1 && *m.NCC <= n); }
      if (m.SCC) { EXPECT_TRUE(*m.SCC >= 0 && *m.SCC <= 1); }
      if (m.DINF) { EXPECT_TRUE(*m.DINF >= 0 && *m.DINF <= 1); }
      if (m.INF) { EXPECT_TRUE(*m.INF >= 0 && *m.INF <= 1); }
      if (m.L) { EXPECT_TRUE(*m.L >= 0 && *m.L <= 40); }
      if (m.SSTK) {
        EXPECT_LE(*m.ASTK, *m.SSTK);
        EXPECT_LE(*m.SSTK, 40.0);
      }
      if (task == TaskKind::Disperse && configs[k].model.kind == ModelKind::Topological) { EXPECT_EQ(*m.I, 0.0); }
    }
  }
}

TEST(RunTrial, InfeasiblePlacementIsRecordedAsAbort) {
  auto cfg = enumerate_design(quick_design(TaskKind::Targets)).front();
  cfg.sim.world_width = cfg.sim.world_height = 150;
  const auto r = run_trial(cfg);
  EXPECT_TRUE(r.aborted);
  const std::string row = results_row(r);
  EXPECT_NE(row.find(",aborted,"), std::string::npos);
  EXPECT_NE(row.find("abort=placement infeasible"), std::string::npos);
}

TEST(RunSweep, WorkerCountDoesNotChangeOutput) {
  const auto d = quick_design(TaskKind::Rally, 20);
  const std::string one = sweep_csv(d, 1);
  const std::string eight = sweep_csv(d, 8);
  EXPECT_EQ(one, eight);
  const auto rows = lines(one);
  ASSERT_EQ(rows.size(), enumerate_design(d).size() + 1);
  EXPECT_EQ(rows[0], kResultsHeader);
}

TEST(RunSweep, RowsAreInTrialOrderWithTwentyFourColumns) {
  const auto d = quick_design(TaskKind::Avoid, 10);
  const auto rows = lines(sweep_csv(d, 3));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::vector<std::string> f;
    std::stringstream ss(rows[k]);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 24u);
    EXPECT_EQ(f[9], std::to_string(k - 1));
    EXPECT_EQ(f[0], "avoid");
    EXPECT_TRUE(f[11].empty());  // PF is not recorded for Avoid
  }
}

TEST(RunSweep, TrialsReproduceInIsolation) {
  const auto d = quick_design(TaskKind::Disperse, 15);
  const auto configs = enumerate_design(d);
  const auto rows = lines(sweep_csv(d, 2));
  for (std::size_t k : {0u, 13u, 31u}) EXPECT_EQ(results_row(run_trial(configs[k])), rows[k + 1]);
}

TEST(RunSweep, ChangingOneSeedChangesOnlyThatTrial) {
  const auto d = quick_design(TaskKind::Goal, 15);
  auto configs = enumerate_design(d);
  configs.resize(6);
  std::vector<std::string> base, changed;
  run_trials(configs, 2, [&](const TrialResult& r) { base.push_back(results_row(r)); });
  configs[3].seed = trial_seed(d.base_seed, 1000);
  run_trials(configs, 2, [&](const TrialResult& r) { changed.push_back(results_row(r)); });
  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (k == 3) EXPECT_NE(base[k], changed[k]);
    else EXPECT_EQ(base[k], changed[k]);
  }
}

TEST(RunSweep, UnwritablePathThrows) {
  EXPECT_THROW(run_sweep(quick_design(TaskKind::Avoid), 1, "/nonexistent-dir/x.csv"), SweepIoError);
}

TEST(ResolveModel, Defaults) {
  SimParams sim;
  const RadiiConfig r{10, 15, 22.5};
  EXPECT_DOUBLE_EQ(std::get<MetricModel>(resolve_model({ModelKind::Metric, 7}, r, sim)).d_met, 22.5);
  EXPECT_EQ(std::get<TopologicalModel>(resolve_model({ModelKind::Topological, 5}, r, sim)).n_top, 5u);
  EXPECT_NEAR(std::get<VisualModel>(resolve_model({ModelKind::Visual, 7}, r, sim)).d_vis, 707.1, 0.01);
}
