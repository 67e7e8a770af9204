// Copyright 2026 The qundo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qundo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <gtest/gtest.h>
#include <random>

#include "qundo/errors.hpp"

namespace qundo {
namespace {

// Wilson score bounds written out directly.
std::pair<double, double> wilson(double k, double n, double z) {
  const double p = k / n;
  const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {centre - half, centre + half};
}

std::vector<double> normal_samples(std::size_t n, double mean, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d(mean, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = d(g);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TEST(Bernoulli, Extremes) {
  const BernoulliEstimate none = bernoulli_estimate(0, 50);
  EXPECT_EQ(none.p_hat, 0.0);
  EXPECT_EQ(none.ci_low, 0.0);
  EXPECT_GT(none.ci_high, 0.0);
  const BernoulliEstimate all = bernoulli_estimate(50, 50);
  EXPECT_EQ(all.p_hat, 1.0);
  EXPECT_EQ(all.ci_high, 1.0);
  EXPECT_THROW(bernoulli_estimate(1, 0), ValidationError);
  EXPECT_THROW(bernoulli_estimate(3, 2), ValidationError);
}

TEST(Bernoulli, MatchesWilsonFormula) {
  const BernoulliEstimate e = bernoulli_estimate(500, 1000);
  EXPECT_EQ(e.p_hat, 0.5);
  EXPECT_NEAR(e.ci_high - e.ci_low, 3.0 / std::sqrt(1000.0), 2e-3);
  for (auto [k, n] : {std::pair{3, 17}, std::pair{912, 1000}, std::pair{66667, 100000}}) {
    const auto [lo, hi] = wilson(k, n, 3.0);
    const BernoulliEstimate b = bernoulli_estimate(k, n);
    EXPECT_NEAR(b.ci_low, lo, 1e-14);
    EXPECT_NEAR(b.ci_high, hi, 1e-14);
    EXPECT_LE(b.ci_low, b.p_hat);
    EXPECT_GE(b.ci_high, b.p_hat);
  }
  EXPECT_NEAR(bernoulli_estimate(250, 1000).standard_error(), std::sqrt(0.25 * 0.75 / 1000), 1e-15);
}

TEST(Bernoulli, Consistency) {
  EXPECT_TRUE(consistent(bernoulli_estimate(500, 1000), bernoulli_estimate(520, 1000)));
  EXPECT_FALSE(consistent(bernoulli_estimate(500, 1000), bernoulli_estimate(700, 1000)));
}

TEST(Ks, SameDistributionIsSmall) {
  const std::size_t n = 100000;
  const EcdfComparison c = ks_distance(normal_samples(n, 0.0, 7), normal_cdf, "normal");
  EXPECT_EQ(c.samples, n);
  EXPECT_EQ(c.reference, "normal");
  EXPECT_LT(c.statistic, ks_critical_value(n));
  EXPECT_NEAR(ks_critical_value(n), 1.95 / std::sqrt(1e5), 1e-15);
}

TEST(Ks, DegenerateAndShifted) {
  const std::vector<double> constant(200, 0.0);
  EXPECT_GE(ks_distance(constant, normal_cdf).statistic, 0.5);
  const EcdfComparison shifted = ks_distance(normal_samples(1000, 1.0, 8), normal_cdf);
  EXPECT_GT(shifted.statistic, 0.3);
  EXPECT_LE(shifted.statistic, 1.0);
}

TEST(Ks, BruteForceOracle) {
  const std::vector<double> s = normal_samples(300, 0.2, 9);
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    d = std::max({d, std::abs(f - double(i) / 300), std::abs(f - double(i + 1) / 300)});
  }
  EXPECT_NEAR(ks_distance(s, normal_cdf).statistic, d, 1e-15);
}

TEST(Ks, Preconditions) {
  EXPECT_THROW(ks_distance(std::vector<double>(99, 0.0), normal_cdf), ValidationError);
  const auto decreasing = [](double x) { return 1.0 - normal_cdf(x); };
  EXPECT_THROW(ks_distance(normal_samples(200, 0.0, 10), decreasing), ValidationError);
}

TEST(Histogram, BinRuleAndCounts) {
  const std::vector<double> s = normal_samples(10000, 0.0, 11);
  const Histogram h = histogram(s);
  EXPECT_GE(h.counts.size(), 20u);
  std::uint64_t total = 0;
  for (std::uint64_t c : h.counts) total += c;
  EXPECT_EQ(total, s.size());
  const std::vector<double> few{1.0, 2.0, 3.0};
  EXPECT_EQ(histogram(few).counts.size(), 20u);
}

TEST(Moments, SymmetricAndSkewed) {
  const std::vector<double> g = normal_samples(100000, 3.0, 12);
  const MomentSummary a = moment_summary(g);
  EXPECT_NEAR(a.mean, 3.0, 3 * a.standard_error);
  EXPECT_NEAR(a.std, 1.0, 0.02);
  EXPECT_NEAR(a.mode, a.mean, 0.2);

  std::mt19937_64 gen(13);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(100000);
  for (double& v : x) v = e(gen);
  const MomentSummary b = moment_summary(x);
  EXPECT_GT(b.mean, b.mode);
  EXPECT_NEAR(b.mean, 1.0, 3 * b.standard_error);
}

TEST(Quantile, Interpolates) {
  const std::vector<double> s{0.0, 1.0, 2.0, 3.0};
  EXPECT_EQ(quantile_sorted(s, 0.0), 0.0);
  EXPECT_EQ(quantile_sorted(s, 1.0), 3.0);
  EXPECT_NEAR(quantile_sorted(s, 0.5), 1.5, 1e-15);
}

}  // namespace
}  // namespace qundo
