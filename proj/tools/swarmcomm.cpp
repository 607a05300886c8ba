// swarmcomm: run one trial, run a factorial sweep, or analyze a results file.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmcomm/analysis.hpp"
#include "swarmcomm/config.hpp"
#include "swarmcomm/harness.hpp"
#include "swarmcomm/stats.hpp"

using namespace swarmcomm;

namespace {

struct RunArgs {
  std::string task = "targets";
  std::string model = "metric";
  std::size_t n = 50;
  double rr = 10.0, ro_mult = 1.5, ra_mult = 1.5;
  std::optional<std::size_t> iters;
  std::uint64_t seed = 1;
  std::optional<double> f1, f2;
  std::string trace;
  std::string spec;
};

int cmd_run(const RunArgs& a) {
  const auto kind = parse_task_kind(a.task);
  if (!kind) throw std::invalid_argument("unknown task '" + a.task + "'");
  const DesignSpec d = a.spec.empty() ? full_design(*kind) : load_design(a.spec, *kind);
  if (d.task != *kind) throw std::invalid_argument("--task disagrees with task.name in the config file");

  TrialConfig c;
  c.sim = d.sim;
  c.model = parse_model_level(a.model);
  c.n_agents = a.n;
  c.radii = {a.rr, a.rr * a.ro_mult, a.rr * a.ro_mult * a.ra_mult};
  c.iterations = a.iters.value_or(default_iterations(*kind));
  c.seed = a.seed;
  const std::size_t nf = task_factor_count(*kind);
  // Task factors default to the middle level of the full grid.
  if (nf >= 1) c.factor1 = a.f1.value_or(d.factor1[d.factor1.size() / 2]);
  if (nf >= 2) c.factor2 = a.f2.value_or(d.factor2[d.factor2.size() / 2]);
  c.task = make_task(*kind, c.factor1.value_or(0.0), c.factor2.value_or(0.0), c.sim);

  std::ofstream trace;
  if (!a.trace.empty()) {
    trace.open(a.trace, std::ios::binary);
    if (!trace) throw std::runtime_error("cannot open trace file: " + a.trace);
  }
  const TrialResult r = run_trial(c, a.trace.empty() ? nullptr : &trace);
  std::cout << kResultsHeader << '\n' << results_row(r) << '\n';
  return r.aborted ? 3 : 0;
}

struct SweepArgs {
  std::string spec;
  std::optional<double> scale;
  std::optional<std::size_t> replicates;
  std::size_t jobs = 1;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_sweep(const SweepArgs& a) {
  DesignSpec d = load_design(a.spec);
  if (a.scale) d.scale = *a.scale;
  if (a.replicates) d.replicates = *a.replicates;
  if (a.seed) d.base_seed = *a.seed;
  const std::size_t total = enumerate_design(d).size();
  std::fprintf(stderr, "sweep: %s, %zu trials on %zu worker(s)\n", task_name(d.task).c_str(), total, a.jobs);
  const SweepSummary s = a.out.empty() ? run_sweep(d, a.jobs, std::cout) : run_sweep(d, a.jobs, a.out);
  std::fprintf(stderr, "sweep: %zu trials (%zu aborted) in %.1f s\n", s.trials, s.aborted, s.seconds);
  return 0;
}

struct AnalyzeArgs {
  std::string in;
  std::string metric;
  std::string by = "model";
  bool posthoc = false;
};

void print_groups(const std::vector<stats::SampleGroup>& groups) {
  std::printf("%-28s %6s %12s %12s %12s\n", "group", "n", "mean", "sd", "median");
  for (const auto& g : groups) {
    const auto d = stats::describe(g);
    std::printf("%-28s %6zu %12.4f %12.4f %12.4f\n", g.label.c_str(), d.n, d.mean, d.sd.value_or(std::nan("")), stats::median(g.values));
  }
}

std::string fmt_p(double p) {
  char buf[32];
  if (p < 0.001) std::snprintf(buf, sizeof buf, "< 0.001");
  else std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

int cmd_analyze(const AnalyzeArgs& a) {
  std::ifstream f(a.in);
  if (!f) throw std::runtime_error("cannot open results file: " + a.in);
  const ResultsTable t = read_results(f);
  std::vector<std::string> factors;
  std::stringstream ss(a.by);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) factors.push_back(item);
  if (factors.empty() || factors.size() > 2) throw std::invalid_argument("--by takes one or two factor columns");

  const auto groups = group_metric(t, a.metric, factors);
  if (groups.empty()) {
    std::printf("%s: no values\n", a.metric.c_str());
    return 1;
  }
  std::printf("%s by %s\n\n", a.metric.c_str(), a.by.c_str());
  print_groups(groups);

  if (factors.size() == 1) {
    const auto r = stats::anova_oneway(groups);
    std::printf("\none-way ANOVA: F(%zu, %zu) = %.4f, p %s\n", r.df_between, r.df_within, r.F,
                fmt_p(r.p).c_str());
    if (a.posthoc) {
      std::printf("\nFisher LSD (alpha 0.05)\n");
      for (const auto& c : stats::fisher_lsd(r, groups))
        std::printf("  %-20s vs %-20s diff %12.4f  t %9.4f  p %-8s %s\n", groups[c.a].label.c_str(),
                    groups[c.b].label.c_str(), c.mean_diff, c.t, fmt_p(c.p).c_str(), c.significant ? "*" : "");
    }
    return 0;
  }

  // Two factors: lay the cells out as a levels(A) x levels(B) table.
  std::vector<std::string> la, lb;
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const auto& g : groups) {
    const auto bar = g.label.find('|');
    const std::string x = g.label.substr(0, bar), y = g.label.substr(bar + 1);
    if (std::find(la.begin(), la.end(), x) == la.end()) la.push_back(x);
    if (std::find(lb.begin(), lb.end(), y) == lb.end()) lb.push_back(y);
    cells[{x, y}] = g.values;
  }
  std::vector<std::vector<std::vector<double>>> table(la.size(), std::vector<std::vector<double>>(lb.size()));
  for (std::size_t i = 0; i < la.size(); ++i)
    for (std::size_t j = 0; j < lb.size(); ++j) table[i][j] = cells[{la[i], lb[j]}];
  const auto r = stats::anova_twoway_balanced(table);
  std::printf("\ntwo-way ANOVA (balanced)\n");
  std::printf("  %-14s SS %14.4f  df %5zu  F %12.4f  p %s\n", factors[0].c_str(), r.a.ss, r.a.df, r.a.F,
              fmt_p(r.a.p).c_str());
  std::printf("  %-14s SS %14.4f  df %5zu  F %12.4f  p %s\n", factors[1].c_str(), r.b.ss, r.b.df, r.b.F,
              fmt_p(r.b.p).c_str());
  std::printf("  %-14s SS %14.4f  df %5zu  F %12.4f  p %s\n", "interaction", r.interaction.ss, r.interaction.df,
              r.interaction.F, fmt_p(r.interaction.p).c_str());
  std::printf("  %-14s SS %14.4f  df %5zu\n", "error", r.ss_within, r.df_within);
  if (a.posthoc) {
    const auto marginal = group_metric(t, a.metric, {factors[0]});
    const auto one = stats::anova_oneway(marginal);
    std::printf("\nFisher LSD on %s (alpha 0.05)\n", factors[0].c_str());
    for (const auto& c : stats::fisher_lsd(one, marginal))
      std::printf("  %-20s vs %-20s diff %12.4f  t %9.4f  p %-8s %s\n", marginal[c.a].label.c_str(),
                  marginal[c.b].label.c_str(), c.mean_diff, c.t, fmt_p(c.p).c_str(), c.significant ? "*" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm communication-model simulator and benchmark harness"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a single trial and print its results row");
  run->add_option("--task", ra.task, "targets|goal|rally|disperse|avoid|follow")->required();
  run->add_option("--model", ra.model, "metric|topological[:n_top]|visual")->required();
  run->add_option("--n", ra.n, "Number of agents")->check(CLI::PositiveNumber);
  run->add_option("--rr", ra.rr, "Repulsion radius r_r (px)")->check(CLI::PositiveNumber);
  run->add_option("--ro-mult", ra.ro_mult, "r_o = ro_mult * r_r")->check(CLI::PositiveNumber);
  run->add_option("--ra-mult", ra.ra_mult, "r_a = ra_mult * r_o")->check(CLI::PositiveNumber);
  run->add_option("--iters", ra.iters, "Iterations (default: task default)");
  run->add_option("--seed", ra.seed, "Trial seed");
  run->add_option("--f1", ra.f1, "First task factor (N_o, p_i)");
  run->add_option("--f2", ra.f2, "Second task factor (N_t, g, s)");
  run->add_option("--trace", ra.trace, "Write a per-iteration trace CSV");
  run->add_option("--config", ra.spec, "Config file for world/model constants");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Run a factorial design and write a results CSV");
  sweep->add_option("--spec", sa.spec, "Design config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--scale", sa.scale, "Fraction of replicates to run")->check(CLI::PositiveNumber);
  sweep->add_option("--replicates", sa.replicates, "Replicates per cell");
  sweep->add_option("--jobs", sa.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sa.out, "Results CSV (default: stdout)");
  sweep->add_option("--seed", sa.seed, "Base seed");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Summarize a results CSV with ANOVA");
  analyze->add_option("--in", aa.in, "Results CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--metric", aa.metric, "Metric column (PF, NCC, PR, L, SCC, D, I, DINF, INF, ASTK, SSTK)")
      ->required();
  analyze->add_option("--by", aa.by, "One or two factor columns, comma separated");
  analyze->add_flag("--posthoc", aa.posthoc, "Fisher LSD pairwise comparisons");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(ra);
    if (*sweep) return cmd_sweep(sa);
    if (*analyze) return cmd_analyze(aa);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
