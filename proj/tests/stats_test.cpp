#include "patternlab/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace patternlab;

// --- cpu series -----------------------------------------------------------

TEST(CpuUtilization, WorkedExample) {
  // cumulative 15 CPU-s at t=1 and 26 CPU-s at t=14 averages 11/13 CPU/s
  std::vector<std::pair<double, double>> samples = {{1.0, 15.0}, {14.0, 26.0}};
  auto derivative = cpu_utilization(samples);
  ASSERT_EQ(derivative.size(), 1u);
  EXPECT_DOUBLE_EQ(derivative[0].first, 14.0);
  EXPECT_NEAR(derivative[0].second, 0.846, 1e-3);
  EXPECT_DOUBLE_EQ(derivative[0].second, 11.0 / 13.0);
}

TEST(CpuUtilization, IdleServiceIsAllZeros) {
  std::vector<std::pair<double, double>> samples = {{0.0, 3.0}, {1.0, 3.0}, {2.0, 3.0}};
  for (const auto& [t, u] : cpu_utilization(samples)) EXPECT_DOUBLE_EQ(u, 0.0);
}

TEST(CpuUtilization, PairwiseDerivative) {
  std::vector<std::pair<double, double>> samples = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.5}};
  auto derivative = cpu_utilization(samples);
  ASSERT_EQ(derivative.size(), 2u);
  EXPECT_DOUBLE_EQ(derivative[0].second, 1.0);
  EXPECT_DOUBLE_EQ(derivative[1].second, 0.5);
}

TEST(CpuUtilization, NeedsTwoSamples) {
  EXPECT_THROW(cpu_utilization({{0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(cpu_utilization({}), std::invalid_argument);
}

TEST(MeanUtilization, WholeWindow) {
  EXPECT_DOUBLE_EQ(mean_utilization({{0.0, 0.0}, {10.0, 5.0}}, 0.0), 0.5);
}

TEST(MeanUtilization, CutSkipsIdlePrefix) {
  EXPECT_DOUBLE_EQ(mean_utilization({{0.0, 0.0}, {5.0, 0.0}, {10.0, 5.0}}, 5.0), 1.0);
}

TEST(MeanUtilization, WorkedExampleWindow) {
  EXPECT_DOUBLE_EQ(mean_utilization({{1.0, 15.0}, {14.0, 26.0}}, 1.0), 11.0 / 13.0);
}

TEST(MeanUtilization, EmptyWindowFails) {
  EXPECT_THROW(mean_utilization({{0.0, 0.0}, {5.0, 2.0}}, 5.0), std::invalid_argument);
  EXPECT_THROW(mean_utilization({{0.0, 0.0}, {5.0, 2.0}}, 9.0), std::invalid_argument);
}

// --- mae --------------------------------------------------------------------

TEST(Mae, Fixtures) {
  EXPECT_DOUBLE_EQ(mae({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), 0.0);
  EXPECT_DOUBLE_EQ(mae({1.0, 2.0, 3.0}, {2.0, 3.0, 4.0}), 1.0);
  EXPECT_DOUBLE_EQ(mae({0.0, 10.0}, {1.0, 7.0}), 2.0);
}

TEST(Mae, Errors) {
  EXPECT_THROW(mae({1.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(mae({}, {}), std::invalid_argument);
}

TEST(Mae, SymmetryAndShiftInvariance) {
  std::vector<double> e = {1.5, -2.0, 7.25, 0.0};
  std::vector<double> o = {2.0, 3.5, 6.0, -1.0};
  EXPECT_DOUBLE_EQ(mae(e, o), mae(o, e));
  std::vector<double> e_shift = e;
  std::vector<double> o_shift = o;
  for (auto& v : e_shift) v += 11.0;
  for (auto& v : o_shift) v += 11.0;
  EXPECT_NEAR(mae(e_shift, o_shift), mae(e, o), 1e-12);
}

// --- experiment averages ------------------------------------------------------

TEST(ExperimentAverages, SixBySix) {
  std::map<std::string, std::vector<double>> runs;
  for (int e = 0; e < 6; ++e) {
    std::vector<double> reps;
    for (int r = 0; r < 6; ++r) reps.push_back(e + r * 0.1);
    runs["exp" + std::to_string(e)] = reps;
  }
  auto averages = experiment_averages(runs);
  EXPECT_EQ(averages.size(), 6u);
  EXPECT_NEAR(averages.at("exp0"), 0.25, 1e-12);
}

TEST(ExperimentAverages, Fixtures) {
  EXPECT_DOUBLE_EQ(experiment_averages({{"e", {5.0}}}).at("e"), 5.0);
  EXPECT_DOUBLE_EQ(experiment_averages({{"e", {2.0, 4.0}}}).at("e"), 3.0);
  EXPECT_THROW(experiment_averages({{"e", {}}}), std::invalid_argument);
}

// --- min-max normalization ------------------------------------------------------

TEST(MinMaxNormalize, EndpointsAndMidpoint) {
  NormalizationBounds bounds{2.0, 6.0};
  auto out = min_max_normalize({2.0, 4.0, 6.0}, bounds);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[1], 0.5);
  EXPECT_DOUBLE_EQ(out[2], 1.0);
}

TEST(MinMaxNormalize, NoClamping) {
  auto out = min_max_normalize({-2.0, 15.0}, {0.0, 10.0});
  EXPECT_DOUBLE_EQ(out[0], -0.2);
  EXPECT_DOUBLE_EQ(out[1], 1.5);
}

TEST(MinMaxNormalize, DegenerateBounds) {
  EXPECT_THROW(min_max_normalize({1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST(MinMaxNormalize, AffineInvariance) {
  std::vector<double> values = {3.0, 8.0, 5.5, 4.0};
  auto bounds = bounds_of(values);
  auto base = min_max_normalize(values, bounds);
  const double a = 2.5, b = -7.0;
  std::vector<double> scaled = values;
  for (auto& v : scaled) v = a * v + b;
  auto rescaled = min_max_normalize(scaled, {a * bounds.min + b, a * bounds.max + b});
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(base[i], rescaled[i], 1e-12);
}

TEST(MinMaxNormalize, OrderPreserving) {
  std::vector<double> values = {9.0, 1.0, 4.0, 7.0};
  auto out = min_max_normalize(values, bounds_of(values));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values.size(); ++j)
      EXPECT_EQ(values[i] < values[j], out[i] < out[j]);
}

// --- spearman -------------------------------------------------------------------

namespace {

// Independent oracle for untied data: rho via 1 - 6*sum(d^2)/(n(n^2-1)).
double rho_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  auto rank_of = [](const std::vector<double>& v) {
    std::vector<int> rank(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] < v[i]) ++rank[i];
    return rank;
  };
  auto rx = rank_of(x);
  auto ry = rank_of(y);
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = rx[i] - ry[i];
    sum_d2 += d * d;
  }
  double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

// Independent two-sided permutation p oracle on the same formula.
double permutation_p_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double observed = std::abs(rho_oracle(x, y));
  std::vector<double> permuted = y;
  std::sort(permuted.begin(), permuted.end());
  long total = 0, hits = 0;
  do {
    ++total;
    if (std::abs(rho_oracle(x, permuted)) >= observed - 1e-12) ++hits;
  } while (std::next_permutation(permuted.begin(), permuted.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST(Spearman, MonotoneIsOne) {
  auto r = spearman({1.0, 2.0, 3.0, 4.0}, {10.0, 20.0, 30.0, 40.0});
  EXPECT_DOUBLE_EQ(r.rho, 1.0);
  EXPECT_EQ(r.p_method, "permutation");
}

TEST(Spearman, ReversalIsMinusOne) {
  auto r = spearman({1.0, 2.0, 3.0, 4.0}, {4.0, 3.0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(r.rho, -1.0);
}

TEST(Spearman, RankFormulaFixture) {
  // d^2 sums to 4, so the rank formula gives 1 - 24/120 = 0.8
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y = {2.0, 1.0, 4.0, 3.0, 5.0};
  EXPECT_DOUBLE_EQ(rho_oracle(x, y), 0.8);
  auto r = spearman(x, y);
  EXPECT_NEAR(r.rho, 0.8, 1e-12);
  EXPECT_NEAR(r.p_value, permutation_p_oracle(x, y), 1e-12);
}

TEST(Spearman, MatchesReferenceImplementationAtN10) {
  // scipy.stats.spearmanr fixtures
  std::vector<double> v1 = {17, 86, 60, 77, 47, 3, 70, 87, 88, 92};
  std::vector<double> v2 = {70, 29, 85, 61, 80, 34, 60, 31, 73, 66};
  auto r = spearman(v1, v2);
  EXPECT_EQ(r.p_method, "t-approximation");
  EXPECT_NEAR(r.rho, -0.16363636363636364, 1e-12);
  EXPECT_NEAR(r.p_value, 0.6514773427962428, 1e-9);
}

TEST(Spearman, TiesUseFractionalRanks) {
  std::vector<double> v1 = {17, 86, 60, 77, 47, 3, 70, 47, 88, 92};
  std::vector<double> v2 = {70, 29, 85, 61, 80, 34, 60, 31, 73, 66};
  auto r = spearman(v1, v2);
  EXPECT_NEAR(r.rho, 0.024316221747202587, 1e-12);
  EXPECT_NEAR(r.p_value, 0.9468397049085097, 1e-9);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(spearman({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(spearman({1.0, 2.0, 3.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(spearman({5.0, 5.0, 5.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  std::vector<double> x = {0.3, 1.7, 0.9, 2.4, 1.1, 0.1};
  std::vector<double> y = {2.0, 9.0, 4.0, 7.0, 6.0, 1.0};
  auto base = spearman(x, y);
  std::vector<double> x_exp = x;
  for (auto& v : x_exp) v = std::exp(v);
  std::vector<double> y_cube = y;
  for (auto& v : y_cube) v = v * v * v;
  auto transformed = spearman(x_exp, y_cube);
  EXPECT_NEAR(base.rho, transformed.rho, 1e-12);
  EXPECT_NEAR(base.p_value, transformed.p_value, 1e-12);
}

TEST(Spearman, SymmetricAndBounded) {
  std::vector<double> x = {4.0, 1.0, 3.0, 5.0, 2.0, 6.0};
  std::vector<double> y = {2.5, 0.5, 9.0, 1.5, 8.0, 3.0};
  auto ab = spearman(x, y);
  auto ba = spearman(y, x);
  EXPECT_DOUBLE_EQ(ab.rho, ba.rho);
  EXPECT_LE(std::abs(ab.rho), 1.0);
  EXPECT_GE(ab.p_value, 0.0);
  EXPECT_LE(ab.p_value, 1.0);
}

// Permutation and t-approximation p-values agree within 0.02 for strong
// correlations at n = 8.
TEST(Spearman, PermutationAgreesWithTApproximationWhenStrong) {
  std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::vector<double>> candidates = {
      {2, 1, 3, 4, 5, 6, 7, 8},        // one adjacent swap, rho ~ 0.976
      {3, 2, 1, 4, 7, 6, 5, 8},        // rho ~ 0.81
  };
  for (const auto& y : candidates) {
    auto exact = spearman(x, y);
    ASSERT_GE(std::abs(exact.rho), 0.8);
    double one_minus_r2 = 1.0 - exact.rho * exact.rho;
    double t = exact.rho * std::sqrt((exact.n - 2) / one_minus_r2);
    boost::math::students_t_distribution<double> dist(exact.n - 2);
    double approx = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    EXPECT_NEAR(exact.p_value, approx, 0.02);
  }
}

// --- sweep comparison -------------------------------------------------------------

TEST(CompareSeries, SelfComparisonIsExact) {
  std::vector<double> mixes = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> curve = {1.5, 1.2, 1.0, 1.1, 1.3, 1.7};
  auto report = compare_series(mixes, {{"delay", curve, curve}});
  ASSERT_EQ(report.scopes.size(), 1u);
  EXPECT_EQ(report.scopes[0].correlation.rho, 1.0);
  EXPECT_EQ(report.scopes[0].mae, 0.0);
  EXPECT_EQ(report.scopes[0].mae_normalized, 0.0);
  EXPECT_LT(report.scopes[0].correlation.p_value, 0.05);
}

TEST(CompareSeries, AffineExperimentalSideKeepsRankAndNormalizedError) {
  std::vector<double> mixes = {0.0, 0.5, 1.0};
  std::vector<double> theoretical = {1.0, 3.0, 2.0};
  std::vector<double> experimental = {2.0 * 1.0 + 7.0, 2.0 * 3.0 + 7.0, 2.0 * 2.0 + 7.0};
  auto report = compare_series(mixes, {{"delay", theoretical, experimental}});
  EXPECT_EQ(report.scopes[0].correlation.rho, 1.0);
  EXPECT_GT(report.scopes[0].mae, 0.0);
  EXPECT_NEAR(report.scopes[0].mae_normalized, 0.0, 1e-12);
}

TEST(CompareSeries, ConstantScopeIsUndefinedNotFatal) {
  std::vector<double> mixes = {0.0, 0.5, 1.0};
  auto report = compare_series(
      mixes, {{"util:gateway", {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}},
              {"delay", {1.0, 2.0, 3.0}, {1.1, 2.1, 3.1}}});
  const auto& constant = report.scopes[0];
  EXPECT_EQ(constant.scope, "util:gateway");
  EXPECT_TRUE(std::isnan(constant.correlation.rho));
  EXPECT_EQ(constant.correlation.p_method, "undefined");
  EXPECT_EQ(constant.mae, 0.0);
  EXPECT_TRUE(std::isnan(constant.mae_normalized));
  EXPECT_EQ(report.scopes[1].correlation.rho, 1.0);
}

TEST(CompareSweeps, MixMisalignmentAndMissingScope) {
  AnalyticPrediction p0;
  p0.mix.probabilities = {{"r1", 0.0}, {"r2", 1.0}};
  p0.response_time = 1.0;
  p0.utilization = {{"s1", 0.5}};
  AnalyticPrediction p1 = p0;
  p1.mix.probabilities = {{"r1", 1.0}, {"r2", 0.0}};
  p1.response_time = 2.0;
  AnalyticPrediction p2 = p0;
  p2.mix.probabilities = {{"r1", 0.5}, {"r2", 0.5}};
  p2.response_time = 1.5;

  std::vector<ExperimentAverages> experimental(3);
  experimental[0] = {0.0, 1.0, {{"s1", 0.5}}};
  experimental[1] = {0.4, 1.4, {{"s1", 0.6}}};  // misaligned
  experimental[2] = {1.0, 2.0, {{"s1", 0.7}}};
  EXPECT_THROW(compare_sweeps({p0, p2, p1}, experimental, "r1"), std::invalid_argument);

  experimental[1].mix_p = 0.5;
  experimental[1].utilization.clear();  // missing scope
  EXPECT_THROW(compare_sweeps({p0, p2, p1}, experimental, "r1"), std::invalid_argument);
}

TEST(CompareSeries, PooledRowUsesNormalizedScopes) {
  std::vector<double> mixes = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> b = {2.0, 3.0, 4.0, 5.0, 6.0};
  auto report = compare_series(mixes, {{"delay", a, b}, {"util:s1", b, a}});
  ASSERT_TRUE(report.pooled_normalized.has_value());
  EXPECT_EQ(report.pooled_normalized->series.theoretical.size(), 10u);
  EXPECT_EQ(report.pooled_normalized->correlation.n, 10);
  EXPECT_EQ(report.pooled_normalized->correlation.p_method, "t-approximation");
}
