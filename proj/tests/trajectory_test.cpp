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

#include "qundo/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <gtest/gtest.h>
#include <numbers>
#include <numeric>

#include "qundo/errors.hpp"
#include "qundo/random_objects.hpp"
#include "qundo/stats.hpp"

namespace qundo {
namespace {

double inverse_gaussian_cdf(double tau, double a) {
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  const double s = std::sqrt(tau);
  return phi((tau - a) / s) + std::exp(2.0 * a) * phi(-(tau + a) / s);
}

TEST(TrajectoryConfig, Validation) {
  TrajectoryConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dtau = 0.2;
  EXPECT_THROW(c.validate(), ValidationError);
  c.dtau = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_DOUBLE_EQ(TrajectoryConfig{}.timeout_for(-2.0), 300.0);
}

TEST(SimulateQnd, ReproducibleAndConsistentPath) {
  TrajectoryConfig c;
  c.record_path = true;
  NoiseStream a(9, 4);
  NoiseStream b(9, 4);
  const TrajectoryRecord ra = simulate_qnd(ChargeState::kOne, 0.7, c, a);
  const TrajectoryRecord rb = simulate_qnd(ChargeState::kOne, 0.7, c, b);
  EXPECT_EQ(ra.path, rb.path);
  EXPECT_EQ(ra.times, rb.times);
  EXPECT_EQ(ra.status, rb.status);
  ASSERT_EQ(ra.path.size(), ra.increments.size() + 1);
  EXPECT_EQ(ra.path.front(), 0.7);
  const double sum = std::accumulate(ra.increments.begin(), ra.increments.end(), 0.0);
  EXPECT_NEAR(sum, ra.r_end - ra.r_start, 1e-12);
}

TEST(SimulateQnd, DriftAndDiffusion) {
  TrajectoryConfig c;
  c.dtau = 0.01;
  c.tau_max = 2.0;
  c.macro_steps = false;
  const int n = 20000;
  for (ChargeState st : {ChargeState::kOne, ChargeState::kTwo}) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      NoiseStream s(21, i);
      const TrajectoryRecord r = simulate_qnd(st, 1e3, c, s);
      ASSERT_EQ(r.status, TrajectoryStatus::kTimedOut);
      const double d = r.r_end - r.r_start;
      m1 += d;
      m2 += d * d;
    }
    m1 /= n;
    const double var = m2 / n - m1 * m1;
    const double tau = 2.0;
    EXPECT_NEAR(m1, drift_velocity(st) * tau, 3.0 * std::sqrt(tau / n));
    EXPECT_NEAR(var, tau, 3.0 * tau * std::sqrt(2.0 / n));
  }
}

TEST(SimulateQnd, StateTwoAlwaysCrosses) {
  TrajectoryConfig c;
  c.tau_max = 50.0 * 1.5;
  for (int i = 0; i < 2000; ++i) {
    NoiseStream s(22, i);
    ASSERT_EQ(simulate_qnd(ChargeState::kTwo, 1.5, c, s).status, TrajectoryStatus::kCrossed);
  }
}

TEST(SimulateQnd, ZeroStartIsCrossed) {
  NoiseStream s(1, 1);
  const TrajectoryRecord r = simulate_qnd(ChargeState::kOne, 0.0, TrajectoryConfig{}, s);
  EXPECT_EQ(r.status, TrajectoryStatus::kCrossed);
  EXPECT_EQ(r.tau_end, 0.0);
}

double crossing_fraction(const TrajectoryConfig& c, double r0, int n, std::uint64_t seed) {
  int crossed = 0;
  for (int i = 0; i < n; ++i) {
    NoiseStream s(seed, i);
    crossed += simulate_qnd(ChargeState::kOne, r0, c, s).status == TrajectoryStatus::kCrossed;
  }
  return static_cast<double>(crossed) / n;
}

TEST(SimulateQnd, CrossingProbabilityStateOne) {
  const int n = 40000;
  for (double r0 : {0.5, 1.0}) {
    const double p = crossing_fraction(TrajectoryConfig{}, r0, n, 23);
    const BernoulliEstimate e = bernoulli_estimate(static_cast<std::uint64_t>(std::llround(p * n)), n);
    EXPECT_TRUE(e.contains(crossing_probability(ChargeState::kOne, r0))) << r0 << " " << p;
  }
}

TEST(SimulateQnd, BridgeCorrectionRemovesCoarseStepBias) {
  TrajectoryConfig c;
  c.dtau = 0.05;
  c.macro_steps = false;
  c.tau_max = 30.0;
  const int n = 40000;
  const double exact = crossing_probability(ChargeState::kOne, 1.0);
  const double with_bridge = crossing_fraction(c, 1.0, n, 24);
  c.bridge_correction = false;
  const double without = crossing_fraction(c, 1.0, n, 24);
  const double se = std::sqrt(exact * (1 - exact) / n);
  EXPECT_NEAR(with_bridge, exact, 3.0 * se);
  EXPECT_LT(without, exact - 5.0 * se);
}

TEST(WaitAndStop, SuccessRateAndWaitingTimes) {
  const QuantumState rho = QuantumState::qubit_diagonal(0.5);
  const int n = 40000;
  std::uint64_t ok = 0;
  std::vector<double> waits;
  for (int i = 0; i < n; ++i) {
    NoiseStream s(25, i);
    const WaitResult w = wait_and_stop(rho, 1.0, TrajectoryConfig{}, s);
    if (w.success) {
      ++ok;
      waits.push_back(w.waiting_time);
      ASSERT_LE(max_abs_diff(w.restored->rho(), rho.rho()), 0.0);
    }
  }
  const BernoulliEstimate e = bernoulli_estimate(ok, n);
  EXPECT_TRUE(e.contains(uncollapse_success_probability(rho, 1.0))) << e.p_hat;
  const EcdfComparison ks = ks_distance(waits, [](double t) { return inverse_gaussian_cdf(t, 1.0); });
  EXPECT_LE(ks.statistic, ks_critical_value(waits.size()));
}

TEST(WaitAndStop, ZeroResultIsImmediate) {
  NoiseStream s(2, 2);
  const QuantumState rho = QuantumState::qubit_diagonal(0.3);
  const WaitResult w = wait_and_stop(rho, 0.0, TrajectoryConfig{}, s);
  EXPECT_TRUE(w.success);
  EXPECT_EQ(w.waiting_time, 0.0);
  EXPECT_EQ(w.restored->rho(), rho.rho());
}

TEST(MeasureThenUndo, ErfLaw) {
  const int n = 40000;
  const QuantumState rho = QuantumState::qubit_diagonal(0.8);
  for (double tau : {0.5, 2.0}) {
    std::uint64_t ok = 0;
    for (int i = 0; i < n; ++i) {
      NoiseStream s(26, i);
      ok += measure_then_undo(rho, tau, TrajectoryConfig{}, s).success;
    }
    EXPECT_TRUE(bernoulli_estimate(ok, n).contains(std::erfc(std::sqrt(tau / 2.0)))) << tau;
  }
}

TEST(QndStretch, ReachesTargetWithExpectedProbability) {
  const QuantumState rho = QuantumState::from_pure(CVector{std::sqrt(0.3), std::sqrt(0.7)});
  const int n = 40000;
  for (double target : {0.8, -0.6}) {
    std::uint64_t ok = 0;
    for (int i = 0; i < n; ++i) {
      NoiseStream s(27, i);
      const StretchResult r = qnd_stretch(rho, target, TrajectoryConfig{}, s);
      if (r.success) {
        ++ok;
        ASSERT_LE(max_abs_diff(r.state->rho(), qnd_posterior(rho, target).rho()), 0.0);
      }
    }
    const double a = std::abs(target);
    const double expected = 0.3 * std::exp(target - a) + 0.7 * std::exp(-target - a);
    EXPECT_TRUE(bernoulli_estimate(ok, n).contains(expected)) << target;
  }
}

TEST(DetectorCurrent, MeanAndVariance) {
  const DetectorParams p{2.0, 0.5, 0.4};
  const QuantumState rho = QuantumState::qubit_diagonal(0.3);
  const double dt = 0.01;
  NoiseStream s(28, 0);
  const int n = 100000;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = detector_current(rho, p, dt, s);
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  const double var = m2 / n - m1 * m1;
  const double expected_var = 0.5 * p.s_i / dt;
  EXPECT_NEAR(m1, 0.3 * 2.0 + 0.7 * 0.5, 3.0 * std::sqrt(expected_var / n));
  EXPECT_NEAR(var, expected_var, 3.0 * expected_var * std::sqrt(2.0 / n));
}

TrajectoryConfig evolving_config() {
  TrajectoryConfig c;
  c.epsilon = 0.8;
  c.tunnel = 1.1;
  c.measure_duration = 2.0;
  return c;
}

TEST(Evolving, QndLimitIsDiagonal) {
  TrajectoryConfig c;
  c.record_path = true;
  NoiseStream s(30, 0);
  const EvolvingRun run = simulate_evolving_pure(CVector{std::sqrt(0.5), std::sqrt(0.5)}, c, s);
  const CMatrix& m = run.extraction.m;
  EXPECT_EQ(m(0, 1), Complex(0.0, 0.0));
  EXPECT_EQ(m(1, 0), Complex(0.0, 0.0));
  EXPECT_NEAR(std::log(std::norm(m(0, 0)) / std::norm(m(1, 1))), 2.0 * run.record.r_end, 1e-10);
  const QuantumState plus = QuantumState::from_pure(CVector{std::sqrt(0.5), std::sqrt(0.5)});
  const QuantumState expected = qnd_posterior(plus, run.record.r_end);
  EXPECT_LE(max_abs_diff(run.final_state.rho(), expected.rho()), 1e-12);
  const double sum = std::accumulate(run.record.increments.begin(), run.record.increments.end(), 0.0);
  EXPECT_NEAR(sum, run.record.r_end, 1e-12);
}

TEST(Evolving, LinearityAndKrausConsistency) {
  const TrajectoryConfig c = evolving_config();
  for (int trial = 0; trial < 100; ++trial) {
    NoiseStream prep(31, trial);
    const CVector psi = random_pure_amplitudes(2, prep);
    NoiseStream s(32, trial);
    const EvolvingRun run = simulate_evolving_pure(psi, c, s);
    const CVector& v1 = run.extraction.v1;
    const CVector& v2 = run.extraction.v2;
    const CVector& out = *run.final_psi;
    const double scale = norm(out);
    for (int i = 0; i < 2; ++i) {
      ASSERT_LE(std::abs(out[i] - (psi[0] * v1[i] + psi[1] * v2[i])), 1e-10 * scale);
    }
    const CVector direct = normalized(out);
    const CVector via_kraus = normalized(run.extraction.m * std::span<const Complex>(psi));
    ASSERT_LE(std::abs(direct[0] - via_kraus[0]) + std::abs(direct[1] - via_kraus[1]), 1e-8);
    ASSERT_LE(max_abs_diff(run.final_state.rho(), CMatrix::outer(direct, direct)), 1e-8);
  }
}

TEST(Evolving, EigenvaluesMatchFormulaAndCauchySchwarz) {
  const TrajectoryConfig c = evolving_config();
  for (int trial = 0; trial < 20; ++trial) {
    NoiseStream s(33, trial);
    const EvolvingRun run = simulate_evolving(QuantumState::maximally_mixed(2), c, s);
    const KrausExtraction& k = run.extraction;
    const HermEig e = herm_eig(hermitian_part(k.m.adjoint() * k.m));
    EXPECT_NEAR(k.lambda_plus, e.values[1], 1e-10 * k.lambda_plus);
    EXPECT_NEAR(k.lambda_minus, e.values[0], 1e-10 * k.lambda_plus);
    EXPECT_GE(k.lambda_minus, 0.0);
    const double n1 = norm(k.v1) * norm(k.v1);
    const double n2 = norm(k.v2) * norm(k.v2);
    const double g = std::abs(inner(k.v1, k.v2));
    const double formula = 0.5 * (n1 + n2) - std::sqrt(0.25 * (n1 - n2) * (n1 - n2) + g * g);
    EXPECT_NEAR(k.lambda_minus, formula, 1e-10 * k.lambda_plus);
  }
}

TEST(Evolving, PurityPreservedOverLongRuns) {
  TrajectoryConfig c = evolving_config();
  c.measure_duration = 10.0;  // 10^4 steps
  NoiseStream s(34, 0);
  const EvolvingRun run = simulate_evolving_pure(CVector{1.0, 0.0}, c, s);
  EXPECT_NEAR(run.final_state.purity(), 1.0, 1e-9);
}

TEST(Evolving, OverflowGuardRescales) {
  TrajectoryConfig c;
  c.detector = DetectorParams{1.0, 0.0, 0.5};
  c.measure_duration = 800.0;
  c.dtau = 0.01;
  NoiseStream s(35, 0);
  const EvolvingRun run = simulate_evolving_pure(CVector{std::sqrt(0.5), std::sqrt(0.5)}, c, s);
  EXPECT_GT(run.extraction.log_scale, 0.0);
  EXPECT_TRUE(run.extraction.m.all_finite());
  EXPECT_TRUE(run.final_state.rho().all_finite());
}

// Final normalized state for a Wiener path sampled at the finest step and
// aggregated to coarser ones.
CVector final_state_at_level(const std::vector<double>& fine, int level, double fine_dtau, double sigma) {
  std::vector<double> normals = fine;
  double dtau = fine_dtau;
  for (int l = 0; l < level; ++l) {
    std::vector<double> coarse(normals.size() / 2);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      coarse[k] = (normals[2 * k] + normals[2 * k + 1]) / std::numbers::sqrt2;
    }
    normals = std::move(coarse);
    dtau *= 2.0;
  }
  for (double& x : normals) x *= sigma;
  TrajectoryConfig c = evolving_config();
  c.dtau = dtau;
  const CVector psi{std::sqrt(0.6), Complex(0.0, std::sqrt(0.4))};
  const EvolvingRun run = simulate_evolving_with_noise(QuantumState::from_pure(psi), c, normals, psi);
  return normalized(*run.final_psi);
}

double convergence_order(double sigma, int paths) {
  const int levels = 5;
  const double fine_dtau = 1.0 / 1024.0;
  const std::size_t steps = 1024;
  std::vector<double> err(levels - 1, 0.0);
  for (int p = 0; p < paths; ++p) {
    NoiseStream s(36, p);
    std::vector<double> fine(steps);
    for (double& x : fine) x = s.normal();
    std::vector<CVector> finals;
    for (int l = 0; l < levels; ++l) finals.push_back(final_state_at_level(fine, l, fine_dtau, sigma));
    for (int l = 0; l + 1 < levels; ++l) {
      const Complex ph = inner(finals[l + 1], finals[l]);
      const Complex align = ph / std::abs(ph);
      double e = 0.0;
      for (int i = 0; i < 2; ++i) e += std::norm(finals[l + 1][i] * align - finals[l][i]);
      err[l] += std::sqrt(e);
    }
  }
  double order = 0.0;
  for (int l = 0; l + 2 < levels; ++l) order += std::log2(err[l + 1] / err[l]);
  return order / (levels - 2);
}

TEST(Evolving, StepHalvingNoiseFreeIsSecondOrder) {
  const double order = convergence_order(0.0, 1);
  std::printf("observed order %.3f\n", order);
  EXPECT_NEAR(order, 2.0, 0.15);
}

TEST(Evolving, StepHalvingStrongOrderWithNoise) {
  // With a shared Wiener path the splitting converges at strong order one.
  const double order = convergence_order(1.0, 64);
  std::printf("observed strong order %.3f\n", order);
  EXPECT_GT(order, 0.85);
  EXPECT_LT(order, 1.5);
}

}  // namespace
}  // namespace qundo
