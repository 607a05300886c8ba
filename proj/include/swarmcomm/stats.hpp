#pragma once
/**
 * @file stats.hpp
 * @brief Descriptive statistics, one- and two-way ANOVA, Fisher LSD.
 *
 * Tail probabilities come from the regularized incomplete beta function,
 * evaluated with the modified Lentz continued fraction:
 *
 *     P(F > f | d1, d2) = I_{d2 / (d2 + d1 f)}(d2/2, d1/2)
 *     P(|T| > t | v)    = I_{v / (v + t^2)}(v/2, 1/2)
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmcomm::stats {

namespace detail {

inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Upper tail of the F distribution.
inline double f_survival(double f, double df1, double df2) {
  if (std::isinf(f)) return 0.0;
  if (!(f > 0.0)) return 1.0;
  return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

/// Two-sided p value of Student's t.
inline double t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

struct Description {
  double mean{0.0};
  std::optional<double> sd;  ///< sample SD; missing for a single value
  std::size_t n{0};
};

/// Mean and sample standard deviation (Welford's single pass).
inline Description describe(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("describe: empty group");
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  Description d{mean, std::nullopt, k};
  if (k >= 2) d.sd = std::sqrt(m2 / static_cast<double>(k - 1));
  return d;
}

inline Description describe(const SampleGroup& g) { return describe(std::span<const double>(g.values)); }

struct AnovaResult {
  double F{0.0};
  std::size_t df_between{0};
  std::size_t df_within{0};
  double p{1.0};
  std::vector<double> group_means;
  std::vector<std::size_t> group_sizes;
  double mse{0.0};
  double ss_between{0.0};
  double ss_within{0.0};
  double ss_total{0.0};
};

namespace detail {

/// F and p from effect and error mean squares; 0/0 is F = 0.
inline void f_test(double ss_effect, double df_effect, double ss_error, double df_error, double& F, double& p) {
  const double ms_effect = ss_effect / df_effect;
  const double ms_error = ss_error / df_error;
  if (ms_effect == 0.0) {
    F = 0.0;
    p = 1.0;
  } else if (ms_error == 0.0) {
    F = std::numeric_limits<double>::infinity();
    p = 0.0;
  } else {
    F = ms_effect / ms_error;
    p = f_survival(F, df_effect, df_error);
  }
}

/// Sums of squares at rounding-residue level, relative to the centered total
/// or to the raw sum of squared values, are zero.
inline double snap(double ss, double ss_total, double raw) {
  return ss <= 1e-13 * ss_total || ss <= 1e-24 * raw ? 0.0 : ss;
}

inline double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace detail

inline AnovaResult anova_oneway(std::span<const SampleGroup> groups) {
  if (groups.size() < 2) throw std::invalid_argument("anova_oneway: need at least two groups");
  std::size_t total_n = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.values.size() < 2) throw std::invalid_argument("anova_oneway: group '" + g.label + "' has fewer than two values");
    total_n += g.values.size();
    grand_sum += std::accumulate(g.values.begin(), g.values.end(), 0.0);
  }
  const double grand = grand_sum / static_cast<double>(total_n);

  AnovaResult r;
  double raw = 0.0;
  for (const auto& g : groups) {
    const double m = detail::mean(g.values);
    r.group_means.push_back(m);
    r.group_sizes.push_back(g.values.size());
    r.ss_between += static_cast<double>(g.values.size()) * (m - grand) * (m - grand);
    for (double v : g.values) {
      r.ss_within += (v - m) * (v - m);
      r.ss_total += (v - grand) * (v - grand);
      raw += v * v;
    }
  }
  r.ss_within = detail::snap(r.ss_within, 0.0, raw);
  r.ss_between = detail::snap(r.ss_between, r.ss_total, raw);
  r.df_between = groups.size() - 1;
  r.df_within = total_n - groups.size();
  r.mse = r.ss_within / static_cast<double>(r.df_within);
  detail::f_test(r.ss_between, static_cast<double>(r.df_between), r.ss_within, static_cast<double>(r.df_within), r.F,
                 r.p);
  return r;
}

struct Effect {
  double ss{0.0};
  std::size_t df{0};
  double F{0.0};
  double p{1.0};
};

struct TwoWayResult {
  Effect a, b, interaction;
  double ss_within{0.0};
  std::size_t df_within{0};
  double mse{0.0};
};

/// Balanced two-way ANOVA with interaction. table[i][j] holds the replicates
/// of cell (A = i, B = j); every cell needs the same count, at least two.
inline TwoWayResult anova_twoway_balanced(const std::vector<std::vector<std::vector<double>>>& table) {
  const std::size_t la = table.size();
  if (la < 2) throw std::invalid_argument("anova_twoway_balanced: factor A needs at least two levels");
  const std::size_t lb = table[0].size();
  if (lb < 2) throw std::invalid_argument("anova_twoway_balanced: factor B needs at least two levels");
  const std::size_t reps = table[0][0].size();
  if (reps < 2) throw std::invalid_argument("anova_twoway_balanced: need at least two replicates per cell");
  for (const auto& row : table) {
    if (row.size() != lb) throw std::invalid_argument("anova_twoway_balanced: ragged factor levels");
    for (const auto& cell : row)
      if (cell.size() != reps) throw std::invalid_argument("anova_twoway_balanced: unbalanced design");
  }

  std::vector<std::vector<double>> cell_mean(la, std::vector<double>(lb));
  std::vector<double> row_mean(la, 0.0), col_mean(lb, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < la; ++i)
    for (std::size_t j = 0; j < lb; ++j) {
      cell_mean[i][j] = detail::mean(table[i][j]);
      row_mean[i] += cell_mean[i][j] / static_cast<double>(lb);
      col_mean[j] += cell_mean[i][j] / static_cast<double>(la);
      grand += cell_mean[i][j] / static_cast<double>(la * lb);
    }

  TwoWayResult r;
  double ss_total = 0.0, raw = 0.0;
  const double n = static_cast<double>(reps);
  for (std::size_t i = 0; i < la; ++i) {
    r.a.ss += static_cast<double>(lb) * n * (row_mean[i] - grand) * (row_mean[i] - grand);
    for (std::size_t j = 0; j < lb; ++j) {
      const double resid = cell_mean[i][j] - row_mean[i] - col_mean[j] + grand;
      r.interaction.ss += n * resid * resid;
      for (double v : table[i][j]) {
        r.ss_within += (v - cell_mean[i][j]) * (v - cell_mean[i][j]);
        ss_total += (v - grand) * (v - grand);
        raw += v * v;
      }
    }
  }
  for (std::size_t j = 0; j < lb; ++j) r.b.ss += static_cast<double>(la) * n * (col_mean[j] - grand) * (col_mean[j] - grand);
  r.ss_within = detail::snap(r.ss_within, 0.0, raw);
  r.a.ss = detail::snap(r.a.ss, ss_total, raw);
  r.b.ss = detail::snap(r.b.ss, ss_total, raw);
  r.interaction.ss = detail::snap(r.interaction.ss, ss_total, raw);

  r.a.df = la - 1;
  r.b.df = lb - 1;
  r.interaction.df = (la - 1) * (lb - 1);
  r.df_within = la * lb * (reps - 1);
  r.mse = r.ss_within / static_cast<double>(r.df_within);
  for (Effect* e : {&r.a, &r.b, &r.interaction})
    detail::f_test(e->ss, static_cast<double>(e->df), r.ss_within, static_cast<double>(r.df_within), e->F, e->p);
  return r;
}

struct PairComparison {
  std::size_t a{0}, b{0};
  double mean_diff{0.0};  ///< mean_a - mean_b
  double t{0.0};
  double p{1.0};
  bool significant{false};
};

/// Fisher's least significant difference on top of a one-way ANOVA.
inline std::vector<PairComparison> fisher_lsd(const AnovaResult& result, std::span<const SampleGroup> groups,
                                              double alpha = 0.05) {
  if (result.group_means.size() != groups.size()) throw std::invalid_argument("fisher_lsd: group count mismatch");
  std::vector<PairComparison> out;
  const double df = static_cast<double>(result.df_within);
  for (std::size_t a = 0; a < groups.size(); ++a)
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      PairComparison c{a, b, result.group_means[a] - result.group_means[b]};
      const double se = std::sqrt(result.mse * (1.0 / static_cast<double>(groups[a].values.size()) +
                                                1.0 / static_cast<double>(groups[b].values.size())));
      if (result.mse == 0.0) {
        const bool differ = c.mean_diff != 0.0;
        c.t = differ ? std::numeric_limits<double>::infinity() : 0.0;
        c.p = differ ? 0.0 : 1.0;
      } else {
        c.t = std::abs(c.mean_diff) / se;
        c.p = t_two_sided(c.t, df);
      }
      c.significant = c.p < alpha;
      out.push_back(c);
    }
  return out;
}

/// Median of a copy of `values`; NaN when empty.
inline double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace swarmcomm::stats
