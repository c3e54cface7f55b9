#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "mva.hpp"
#include "sim.hpp"

namespace patternlab {

// --- cumulative-CPU series --------------------------------------------------

// Discrete derivative between consecutive samples of a cumulative-CPU series:
// the average CPU/s over each interval, reported at the interval's right edge.
inline std::vector<std::pair<double, double>> cpu_utilization(
    const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("cpu_utilization needs at least 2 samples");
  std::vector<std::pair<double, double>> out;
  out.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    double dt = samples[i].first - samples[i - 1].first;
    if (!(dt > 0.0)) throw std::invalid_argument("sample times must be strictly increasing");
    out.emplace_back(samples[i].first, (samples[i].second - samples[i - 1].second) / dt);
  }
  return out;
}

// Average CPU/s over the whole window from warmup_cut to the final sample,
// i.e. the derivative taken across the window. The cumulative value at the
// cut is interpolated when the cut falls between samples.
inline double mean_utilization(const std::vector<std::pair<double, double>>& samples,
                               double warmup_cut) {
  if (samples.size() < 2)
    throw std::invalid_argument("mean_utilization needs at least 2 samples");
  if (warmup_cut < samples.front().first)
    throw std::invalid_argument("warmup cut precedes the first sample");
  if (!(samples.back().first > warmup_cut))
    throw std::invalid_argument("series ends before the warmup cut: empty window");
  double cut_value = samples.front().second;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].first >= warmup_cut) {
      const auto& [t0, c0] = samples[i - 1];
      const auto& [t1, c1] = samples[i];
      cut_value = t1 == t0 ? c0 : c0 + (c1 - c0) * (warmup_cut - t0) / (t1 - t0);
      break;
    }
  }
  return (samples.back().second - cut_value) / (samples.back().first - warmup_cut);
}

// --- error metrics ------------------------------------------------------------

inline double mae(const std::vector<double>& expected, const std::vector<double>& observed) {
  if (expected.size() != observed.size()) throw std::invalid_argument("mae: length mismatch");
  if (expected.empty()) throw std::invalid_argument("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) sum += std::abs(expected[i] - observed[i]);
  return sum / static_cast<double>(expected.size());
}

// Mean per experiment across its repetitions.
inline std::map<std::string, double> experiment_averages(
    const std::map<std::string, std::vector<double>>& runs_by_experiment) {
  std::map<std::string, double> out;
  for (const auto& [experiment, values] : runs_by_experiment) {
    if (values.empty())
      throw std::invalid_argument("experiment '" + experiment + "' has no runs");
    out[experiment] = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  }
  return out;
}

struct NormalizationBounds {
  double min = 0.0;
  double max = 0.0;
};

// Bounds for min-max scaling, taken over per-experiment averages so outlier
// runs cannot stretch the range.
inline NormalizationBounds bounds_of(const std::vector<double>& experiment_means) {
  if (experiment_means.empty()) throw std::invalid_argument("bounds_of: empty input");
  auto [lo, hi] = std::minmax_element(experiment_means.begin(), experiment_means.end());
  return {*lo, *hi};
}

// Affine min-max scaling; deliberately unclamped, so values outside the
// bounds land outside [0, 1] and stay visible.
inline std::vector<double> min_max_normalize(const std::vector<double>& values,
                                             NormalizationBounds bounds) {
  if (!(bounds.max > bounds.min))
    throw std::invalid_argument("degenerate bounds: a constant series cannot be normalized");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - bounds.min) / (bounds.max - bounds.min));
  return out;
}

// --- rank correlation ---------------------------------------------------------

// 1-based ranks with ties averaged (fractional ranks).
inline std::vector<double> fractional_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double averaged = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = averaged;
    i = j + 1;
  }
  return ranks;
}

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  std::string p_method;  // "permutation" below 10 samples, "t-approximation" from 10
};

namespace detail {

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw std::invalid_argument("undefined correlation: zero variance in ranks");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Exact two-sided permutation distribution of the rank correlation: the
// fraction of all orderings whose |rho| reaches the observed one. Distinct
// arrangements of tied ranks are equally likely, so enumerating them with
// next_permutation is exact.
inline double exact_permutation_p(const std::vector<double>& x_ranks,
                                  std::vector<double> y_ranks, double observed) {
  std::sort(y_ranks.begin(), y_ranks.end());
  const double cutoff = std::abs(observed) - 1e-12;
  std::int64_t total = 0;
  std::int64_t at_least = 0;
  do {
    ++total;
    if (std::abs(pearson(x_ranks, y_ranks)) >= cutoff) ++at_least;
  } while (std::next_permutation(y_ranks.begin(), y_ranks.end()));
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace detail

// Spearman's rank correlation with fractional ranks. The p-value is the exact
// permutation probability for n < 10 (the per-pattern sweeps have only 6
// points, where the t-approximation is unreliable) and the two-sided
// t-approximation t = rho * sqrt((n-2)/(1-rho^2)) otherwise.
inline CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("spearman needs at least 3 samples");
  auto x_ranks = fractional_ranks(x);
  auto y_ranks = fractional_ranks(y);

  CorrelationResult out;
  out.n = static_cast<int>(x.size());
  out.rho = detail::pearson(x_ranks, y_ranks);
  if (x_ranks == y_ranks) out.rho = 1.0;  // keep self-comparison exact

  if (out.n < 10) {
    out.p_value = detail::exact_permutation_p(x_ranks, y_ranks, out.rho);
    out.p_method = "permutation";
  } else {
    double one_minus_r2 = 1.0 - out.rho * out.rho;
    if (one_minus_r2 <= 0.0) {
      out.p_value = 0.0;
    } else {
      double t = out.rho * std::sqrt((out.n - 2) / one_minus_r2);
      boost::math::students_t_distribution<double> dist(out.n - 2);
      out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
    out.p_method = "t-approximation";
  }
  return out;
}

// --- sweep comparison ---------------------------------------------------------

// Aligned per-mix values for one scope ("delay" or "util:<service>").
struct SweepScope {
  std::string scope;
  std::vector<double> theoretical;
  std::vector<double> experimental;
};

struct ScopeComparison {
  std::string scope;
  CorrelationResult correlation;  // rho/p are NaN with method "undefined" for
                                  // constant series
  double mae = 0.0;
  double mae_normalized = std::numeric_limits<double>::quiet_NaN();
  SweepScope series;
};

struct ComparisonReport {
  std::vector<double> mix_points;
  std::vector<ScopeComparison> scopes;
  // Rank agreement pooled over every normalizable scope; large enough for the
  // t-approximation.
  std::optional<ScopeComparison> pooled_normalized;
};

namespace detail {

inline ScopeComparison compare_scope(SweepScope scope) {
  ScopeComparison out;
  out.scope = scope.scope;
  out.mae = mae(scope.theoretical, scope.experimental);
  try {
    out.correlation = spearman(scope.theoretical, scope.experimental);
  } catch (const std::invalid_argument&) {
    out.correlation = {std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(),
                       static_cast<int>(scope.theoretical.size()), "undefined"};
  }
  try {
    auto nt = min_max_normalize(scope.theoretical, bounds_of(scope.theoretical));
    auto ne = min_max_normalize(scope.experimental, bounds_of(scope.experimental));
    out.mae_normalized = mae(nt, ne);
  } catch (const std::invalid_argument&) {
    // degenerate bounds on a constant series; left NaN
  }
  out.series = std::move(scope);
  return out;
}

}  // namespace detail

inline ComparisonReport compare_series(std::vector<double> mix_points,
                                       std::vector<SweepScope> scopes) {
  for (const auto& s : scopes)
    if (s.theoretical.size() != mix_points.size() || s.experimental.size() != mix_points.size())
      throw std::invalid_argument("scope '" + s.scope + "': series length mismatch");

  ComparisonReport report;
  report.mix_points = std::move(mix_points);
  std::vector<double> pool_theoretical;
  std::vector<double> pool_experimental;
  for (auto& s : scopes) {
    try {
      auto nt = min_max_normalize(s.theoretical, bounds_of(s.theoretical));
      auto ne = min_max_normalize(s.experimental, bounds_of(s.experimental));
      pool_theoretical.insert(pool_theoretical.end(), nt.begin(), nt.end());
      pool_experimental.insert(pool_experimental.end(), ne.begin(), ne.end());
    } catch (const std::invalid_argument&) {
      // constant scope; excluded from the pool
    }
    report.scopes.push_back(detail::compare_scope(std::move(s)));
  }
  if (pool_theoretical.size() >= 3) {
    SweepScope pooled{"pooled_normalized", std::move(pool_theoretical),
                      std::move(pool_experimental)};
    auto comparison = detail::compare_scope(std::move(pooled));
    // the pool is already normalized; both error columns read the same
    comparison.mae_normalized = comparison.mae;
    report.pooled_normalized = std::move(comparison);
  }
  return report;
}

// One averaged sweep point on the experimental side.
struct ExperimentAverages {
  double mix_p = 0.0;
  double mean_delay = 0.0;
  std::map<std::string, double> utilization;  // busy fraction per service
};

// Compares a theoretical sweep with experiment averages, scope by scope:
// system delay plus each service's utilization. Spearman runs on aligned
// per-mix values; normalized MAE uses each dataset's own bounds.
inline ComparisonReport compare_sweeps(const std::vector<AnalyticPrediction>& theoretical,
                                       const std::vector<ExperimentAverages>& experimental,
                                       const std::string& sweep_type) {
  if (theoretical.size() != experimental.size())
    throw std::invalid_argument("sweep size mismatch: " + std::to_string(theoretical.size()) +
                                " theoretical vs " + std::to_string(experimental.size()) +
                                " experimental points");
  if (theoretical.empty()) throw std::invalid_argument("empty sweep");

  std::vector<double> mix_points;
  for (std::size_t i = 0; i < theoretical.size(); ++i) {
    double p = theoretical[i].mix.probability(sweep_type);
    if (std::abs(p - experimental[i].mix_p) > 1e-9)
      throw std::invalid_argument("mix misalignment at index " + std::to_string(i) +
                                  ": theoretical p=" + std::to_string(p) + " vs experimental p=" +
                                  std::to_string(experimental[i].mix_p));
    mix_points.push_back(p);
  }

  std::vector<SweepScope> scopes;
  SweepScope delay{"delay", {}, {}};
  for (std::size_t i = 0; i < theoretical.size(); ++i) {
    delay.theoretical.push_back(theoretical[i].response_time);
    delay.experimental.push_back(experimental[i].mean_delay);
  }
  scopes.push_back(std::move(delay));

  for (const auto& [service, unused] : theoretical.front().utilization) {
    SweepScope scope{"util:" + service, {}, {}};
    for (std::size_t i = 0; i < theoretical.size(); ++i) {
      scope.theoretical.push_back(theoretical[i].utilization_of(service));
      auto it = experimental[i].utilization.find(service);
      if (it == experimental[i].utilization.end())
        throw std::invalid_argument("missing scope 'util:" + service + "' at mix p=" +
                                    std::to_string(experimental[i].mix_p));
      scope.experimental.push_back(it->second);
    }
    scopes.push_back(std::move(scope));
  }
  return compare_series(std::move(mix_points), std::move(scopes));
}

// --- per-run summaries ----------------------------------------------------------

struct RunSummary {
  double mean_delay = 0.0;  // s, post-warmup
  double throughput = 0.0;  // req/s, post-warmup
  std::int64_t completions = 0;
  std::map<std::string, double> utilization;               // busy fraction per service
  std::vector<std::pair<int, double>> delay_percentiles;   // {50, 90, 95, 99}
};

inline RunSummary summarize_run(const RunResult& run) {
  const double cut = run.config.warmup_cut();
  const double window = run.config.duration - cut;

  std::vector<double> delays;
  delays.reserve(run.delays.size());
  for (const auto& d : run.delays)
    if (d.start >= cut) delays.push_back(d.end - d.start);

  RunSummary summary;
  summary.completions = static_cast<std::int64_t>(delays.size());
  summary.throughput = static_cast<double>(delays.size()) / window;
  if (!delays.empty())
    summary.mean_delay =
        std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());

  std::sort(delays.begin(), delays.end());
  for (int q : {50, 90, 95, 99}) {
    double value = 0.0;
    if (!delays.empty()) {
      auto rank = static_cast<std::size_t>(
          std::ceil(q / 100.0 * static_cast<double>(delays.size())));
      value = delays[std::min(delays.size() - 1, rank == 0 ? 0 : rank - 1)];
    }
    summary.delay_percentiles.emplace_back(q, value);
  }

  for (const auto& trace : run.services)
    summary.utilization[trace.service] =
        mean_utilization(trace.cpu_samples, cut) / trace.capacity;
  return summary;
}

}  // namespace patternlab
