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

#include "qundo/evolving_uncollapse.hpp"

#include <cmath>
#include <gtest/gtest.h>

#include "qundo/errors.hpp"
#include "qundo/random_objects.hpp"
#include "qundo/stats.hpp"

namespace qundo {
namespace {

TrajectoryConfig evolving_config() {
  TrajectoryConfig c;
  c.epsilon = 0.8;
  c.tunnel = 1.1;
  c.measure_duration = 2.0;
  return c;
}

KrausExtraction simulated_operator(std::uint64_t index) {
  NoiseStream s(40, index);
  return simulate_evolving(QuantumState::maximally_mixed(2), evolving_config(), s).extraction;
}

// True when a == c b for some complex c.
double proportionality_defect(const CMatrix& a, const CMatrix& b) {
  std::size_t r = 0;
  std::size_t col = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      if (std::abs(b(i, j)) > std::abs(b(r, col))) {
        r = i;
        col = j;
      }
  const Complex c = a(r, col) / b(r, col);
  return max_abs_diff(a, b * c) / a.max_abs();
}

TEST(Plan, DiagonalOperatorWaitsForZero) {
  const double r0 = 0.9;
  const CMatrix m{{std::exp(r0 / 2), 0.0}, {0.0, std::exp(-r0 / 2)}};
  const KrausExtraction k = KrausExtraction::from_matrix(m);
  EXPECT_NEAR(k.lambda_plus, std::exp(r0), 1e-14);
  EXPECT_NEAR(k.lambda_minus, std::exp(-r0), 1e-14);
  const UncollapsePlan plan = plan_from_kraus(k);
  EXPECT_NEAR(plan.target, r0, 1e-14);
  // U swaps the basis and V undoes the swap, so the QND walk from r0 towards
  // zero is recovered.
  EXPECT_LE(proportionality_defect(plan.u * plan.l() * plan.v, inverse(m)), 1e-12);
  EXPECT_LE(unitarity_defect(plan.v), 1e-12);
}

TEST(Plan, UnitaryOperator) {
  NoiseStream s(41, 0);
  const CMatrix u = random_unitary(2, s);
  const UncollapsePlan plan = plan_from_kraus(KrausExtraction::from_matrix(u * Complex(0.3)));
  EXPECT_EQ(plan.target, 0.0);
  EXPECT_LE(proportionality_defect(plan.u * plan.v, u.adjoint()), 1e-12);
}

TEST(Plan, SimulatedOperatorsCompose) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const KrausExtraction k = simulated_operator(i);
    for (SvdOrdering o : {SvdOrdering::kMinusFirst, SvdOrdering::kPlusFirst}) {
      const UncollapsePlan plan = plan_from_kraus(k, o);
      EXPECT_LE(unitarity_defect(plan.v), 1e-9);
      EXPECT_LE(unitarity_defect(plan.u), 1e-12);
      const CMatrix prod = plan.u * plan.l() * plan.v * k.m;
      EXPECT_LE(proportionality_defect(prod, CMatrix::identity(2)), 1e-8);
      EXPECT_LE(max_abs_diff(prod, CMatrix::identity(2) * Complex(plan.magnitude)), 1e-8 * plan.magnitude);
      // Columns of U are eigenvectors of M^dagger M.
      const CMatrix e = k.m.adjoint() * k.m;
      const CMatrix d = plan.u.adjoint() * e * plan.u;
      EXPECT_LE(std::abs(d(0, 1)), 1e-10 * k.lambda_plus);
      EXPECT_GT(o == SvdOrdering::kMinusFirst ? plan.target : -plan.target, 0.0);
      EXPECT_NEAR(std::abs(plan.target), 0.5 * std::log(k.lambda_plus / k.lambda_minus), 1e-12);
    }
    // The two orderings swap columns of U and flip the target.
    const UncollapsePlan a = plan_from_kraus(k, SvdOrdering::kMinusFirst);
    const UncollapsePlan b = plan_from_kraus(k, SvdOrdering::kPlusFirst);
    EXPECT_DOUBLE_EQ(a.target, -b.target);
    EXPECT_LE(max_abs_diff(CMatrix::column(a.u.col(0)), CMatrix::column(b.u.col(1))), 1e-12);
  }
}

TEST(Plan, PhaseConventionPinsColumns) {
  const UncollapsePlan plan = plan_from_kraus(simulated_operator(3));
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t big = std::abs(plan.u(0, c)) >= std::abs(plan.u(1, c)) ? 0 : 1;
    EXPECT_EQ(plan.u(big, c).imag(), 0.0);
    EXPECT_GT(plan.u(big, c).real(), 0.0);
  }
}

TEST(Plan, DistinctOperatorsGiveDistinctPlans) {
  // Small perturbations along each of the six real directions of a
  // determinant-normalized operator change the plan.
  const KrausExtraction base = simulated_operator(5);
  const UncollapsePlan p0 = plan_from_kraus(base);
  for (int dir = 0; dir < 8; ++dir) {
    CMatrix m = base.m;
    const Complex step = dir % 2 == 0 ? Complex(1e-4, 0.0) : Complex(0.0, 1e-4);
    m(dir / 4, (dir / 2) % 2) += step * m.max_abs();
    const UncollapsePlan p = plan_from_kraus(KrausExtraction::from_matrix(m));
    const double change = max_abs_diff(p.v, p0.v) + max_abs_diff(p.u, p0.u) + std::abs(p.target - p0.target);
    EXPECT_GT(change, 1e-7) << dir;
  }
}

TEST(Plan, ImpossibleWhenSingular) {
  const KrausExtraction k = KrausExtraction::from_matrix(CMatrix{{1.0, 2.0}, {0.5, 1.0 + 1e-15}});
  EXPECT_THROW(plan_from_kraus(k), UncollapseImpossibleError);
}

TEST(Bound, ReducesToQndFormulaAndSaturates) {
  const double p1 = 0.8;
  const double p2 = 0.3;
  const KrausExtraction k = KrausExtraction::from_matrix(CMatrix{{std::sqrt(p1), 0.0}, {0.0, std::sqrt(p2)}});
  const QuantumState rho = QuantumState::qubit_diagonal(0.4);
  const double r0 = 0.5 * std::log(p1 / p2);
  EXPECT_NEAR(success_bound(k, rho), uncollapse_success_probability(rho, r0), 1e-12);

  const KrausExtraction sim = simulated_operator(7);
  const HermEig e = herm_eig(hermitian_part(sim.m.adjoint() * sim.m));
  EXPECT_NEAR(success_bound(sim, QuantumState::from_pure(e.vectors.col(0))), 1.0, 1e-10);
}

TEST(Bound, MatchesGeneralBound) {
  NoiseStream s(42, 0);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const KrausExtraction k = simulated_operator(i);
    CMatrix m = k.m;
    m *= 1.0 / std::sqrt(k.lambda_plus);
    const KrausOperator op(m);
    const QuantumState rho = random_pure_state(2, s);
    EXPECT_NEAR(success_bound(k, rho), success_probability_bound(op, rho), 1e-10);
  }
}

TEST(Execute, RestoresAndMatchesBound) {
  const TrajectoryConfig c = evolving_config();
  NoiseStream prep(43, 0);
  for (std::uint64_t i = 0; i < 4; ++i) {
    const KrausExtraction k = simulated_operator(i);
    const UncollapsePlan plan = plan_from_kraus(k);
    const QuantumState rho = random_mixed_state(2, prep);
    const QuantumState measured = transform_state(k.m, rho);
    EXPECT_NEAR(plan_success_probability(plan, measured), success_bound(k, rho), 1e-10);
    const int n = 10000;
    std::uint64_t ok = 0;
    for (int j = 0; j < n; ++j) {
      NoiseStream s(44, i * n + j);
      const PlanResult r = execute_plan(plan, measured, c, s);
      if (r.success) {
        ++ok;
        ASSERT_LE(max_abs_diff(r.restored->rho(), rho.rho()), 1e-9);
      }
    }
    EXPECT_TRUE(bernoulli_estimate(ok, n).contains(success_bound(k, rho))) << i;
  }
}

TEST(Execute, MinusEigenstateAlwaysSucceeds) {
  const KrausExtraction k = simulated_operator(9);
  const HermEig e = herm_eig(hermitian_part(k.m.adjoint() * k.m));
  const QuantumState rho = QuantumState::from_pure(e.vectors.col(0));
  const QuantumState measured = transform_state(k.m, rho);
  for (SvdOrdering o : {SvdOrdering::kMinusFirst, SvdOrdering::kPlusFirst}) {
    const UncollapsePlan plan = plan_from_kraus(k, o);
    for (int j = 0; j < 2000; ++j) {
      NoiseStream s(45, j);
      const PlanResult r = execute_plan(plan, measured, evolving_config(), s);
      ASSERT_TRUE(r.success);
      ASSERT_GE(fidelity(*r.restored, rho), 1.0 - 1e-9);
    }
  }
}

TEST(TwoStep, ExactButBelowBound) {
  const TrajectoryConfig c = evolving_config();
  for (std::uint64_t i = 0; i < 5; ++i) {
    const KrausExtraction k = simulated_operator(i);
    const HermEig e = herm_eig(hermitian_part(k.m.adjoint() * k.m));
    const QuantumState rho = QuantumState::from_pure(e.vectors.col(0));
    const QuantumState measured = transform_state(k.m, rho);
    const TwoStepPlan plan = plan_two_step(k, 1.0);
    EXPECT_LT(plan.first_target, 0.0);
    const CMatrix total = plan.final_unitary * qnd_kraus(plan.second_target) * plan.second_rotation *
                          qnd_kraus(plan.first_target) * plan.first_rotation * k.m;
    EXPECT_LE(proportionality_defect(total, CMatrix::identity(2)), 1e-6);
    const double p = two_step_success_probability(plan, measured);
    EXPECT_LT(p, success_bound(k, rho));
    const int n = 40000;
    std::uint64_t ok = 0;
    for (int j = 0; j < n; ++j) {
      NoiseStream s(46, i * n + j);
      const TwoStepResult r = execute_two_step(plan, measured, c, s);
      if (r.success) {
        ++ok;
        ASSERT_GE(fidelity(*r.restored, rho), 1.0 - 1e-6);
      }
    }
    EXPECT_TRUE(bernoulli_estimate(ok, n).contains(p)) << i;
  }
}

TEST(TwoStep, OrthogonalEqualNormIsTrivial) {
  NoiseStream s(47, 0);
  const CMatrix u = random_unitary(2, s);
  const KrausExtraction k = KrausExtraction::from_matrix(u * Complex(0.5));
  const TwoStepPlan plan = plan_two_step(k, 2.0);
  EXPECT_EQ(plan.first_target, 0.0);
  EXPECT_NEAR(plan.second_target, 0.0, 1e-12);
  const QuantumState rho = random_mixed_state(2, s);
  EXPECT_NEAR(two_step_success_probability(plan, transform_state(k.m, rho)), 1.0, 1e-12);
  EXPECT_THROW(plan_two_step(k, 0.0), ValidationError);
}

}  // namespace
}  // namespace qundo
