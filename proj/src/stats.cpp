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

#include "qundo/errors.hpp"

namespace qundo {

namespace {

constexpr std::size_t kMinKsSamples = 100;
constexpr std::size_t kMaxBins = 100000;

}  // namespace

double BernoulliEstimate::standard_error() const {
  return trials == 0 ? 0.0 : std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

BernoulliEstimate bernoulli_estimate(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw ValidationError("bernoulli_estimate: trials must be positive");
  if (successes > trials) throw ValidationError("bernoulli_estimate: successes exceed trials");
  if (!(z > 0.0)) throw ValidationError("bernoulli_estimate: z must be positive");
  BernoulliEstimate e;
  e.successes = successes;
  e.trials = trials;
  e.z = z;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  e.p_hat = p;
  const double z2n = z * z / n;
  const double center = (p + 0.5 * z2n) / (1.0 + z2n);
  const double half = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n);
  e.ci_low = successes == 0 ? 0.0 : std::clamp(center - half, 0.0, p);
  e.ci_high = successes == trials ? 1.0 : std::clamp(center + half, p, 1.0);
  return e;
}

bool consistent(const BernoulliEstimate& a, const BernoulliEstimate& b, double z) {
  const double sa = a.standard_error();
  const double sb = b.standard_error();
  return std::abs(a.p_hat - b.p_hat) <= z * std::sqrt(sa * sa + sb * sb);
}

EcdfComparison ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                           std::string reference) {
  if (samples.size() < kMinKsSamples) throw ValidationError("ks_distance: at least 100 samples required");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  double previous = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    if (!std::isfinite(f) || f < previous - 1e-12) {
      throw ValidationError("ks_distance: reference CDF is not monotone on the samples");
    }
    previous = f;
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return EcdfComparison{samples.size(), std::min(d, 1.0), std::move(reference)};
}

double ks_critical_value(std::size_t n, double c) { return c / std::sqrt(static_cast<double>(n)); }

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile_sorted: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Histogram histogram(std::span<const double> samples, std::size_t min_bins) {
  if (samples.empty()) throw ValidationError("histogram: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double range = sorted.back() - lo;
  Histogram h;
  h.low = lo;
  std::size_t bins = std::max<std::size_t>(min_bins, 1);
  if (range > 0.0) {
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double fd = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    if (fd > 0.0) bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(range / fd)), bins, kMaxBins);
    h.width = range / static_cast<double>(bins);
  } else {
    h.width = 1.0;
    h.low = lo - 0.5 * static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double x : sorted) {
    auto b = static_cast<std::size_t>((x - h.low) / h.width);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

MomentSummary moment_summary(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("moment_summary: at least two samples required");
  MomentSummary m;
  m.samples = samples.size();
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  m.mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / (n - 1.0));
  m.standard_error = m.std / std::sqrt(n);
  const Histogram h = histogram(samples);
  const auto peak = std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin();
  m.mode = h.center(static_cast<std::size_t>(peak));
  return m;
}

}  // namespace qundo
