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

#pragma once

// Estimators for Monte Carlo output. All functions are deterministic in
// their inputs.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qundo {

constexpr double kDefaultZ = 3.0;

struct BernoulliEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;   // Wilson score interval
  double ci_high = 0.0;
  double z = kDefaultZ;

  bool contains(double p) const { return p >= ci_low && p <= ci_high; }
  double standard_error() const;
};

BernoulliEstimate bernoulli_estimate(std::uint64_t successes, std::uint64_t trials, double z = kDefaultZ);

/// |p1 - p2| within z combined standard errors.
bool consistent(const BernoulliEstimate& a, const BernoulliEstimate& b, double z = kDefaultZ);

struct EcdfComparison {
  std::size_t samples = 0;
  double statistic = 0.0;  // sup |F_n - F|
  std::string reference;
};

EcdfComparison ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                           std::string reference = "");

/// c / sqrt(n); c = 1.95 is exceeded with probability below 0.1 %.
double ks_critical_value(std::size_t n, double c = 1.95);

struct Histogram {
  double low = 0.0;
  double width = 0.0;
  std::vector<std::uint64_t> counts;

  double center(std::size_t bin) const { return low + (static_cast<double>(bin) + 0.5) * width; }
};

/// Freedman-Diaconis bin width with at least `min_bins` bins.
Histogram histogram(std::span<const double> samples, std::size_t min_bins = 20);

struct MomentSummary {
  std::size_t samples = 0;
  double mean = 0.0;
  double std = 0.0;
  double standard_error = 0.0;
  double mode = 0.0;  // centre of the most populated histogram bin
};

MomentSummary moment_summary(std::span<const double> samples);

double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace qundo
