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

#include "qundo/multiqubit.hpp"

#include <algorithm>
#include <cmath>
#include <gtest/gtest.h>
#include <numeric>

#include "qundo/errors.hpp"
#include "qundo/phase_qubit.hpp"
#include "qundo/random_objects.hpp"
#include "qundo/stats.hpp"

namespace qundo {
namespace {

constexpr double kGamma = 1.7;

KrausOperator random_op(std::size_t dim, std::uint64_t index) {
  NoiseStream s(60, index);
  return random_kraus(dim, 0.2, s);
}

TEST(Plan, SingleQubitMatchesPhaseQubit) {
  const double pt = 0.4;
  const KrausOperator m(null_kraus({pt, 0.0}));
  const StepPlan plan = build_plan(m, kGamma);
  ASSERT_EQ(plan.steps.size(), 2u);
  std::size_t trivial = 0;
  for (const PlanStep& s : plan.steps) {
    if (s.duration == 0.0) {
      ++trivial;
    } else {
      EXPECT_NEAR(s.shrink, std::sqrt(1.0 - pt), 1e-14);
      EXPECT_NEAR(kGamma * s.duration, -std::log(1.0 - pt), 1e-13);
    }
  }
  EXPECT_EQ(trivial, 1u);
  const CMatrix expect{{std::sqrt(1.0 - pt), 0.0}, {0.0, 1.0}};
  EXPECT_LE(max_abs_diff(plan.target_operator(), expect), 1e-14);
  EXPECT_LE(max_abs_diff(plan.operator_product(), expect), 1e-12);
  const QuantumState rho = QuantumState::qubit_diagonal(0.3);
  EXPECT_NEAR(success_probability(plan, prepare_input(plan, null_update(rho, {pt, 0.0}))),
              success_probability(rho, PhaseMeasurementParams{pt, 0.0}), 1e-12);
}

TEST(Plan, ScalarEffectNeedsNoWaiting) {
  const KrausOperator m(CMatrix::identity(4) * Complex(0.6));
  const StepPlan plan = build_plan(m, kGamma);
  for (const PlanStep& s : plan.steps) EXPECT_EQ(s.duration, 0.0);
  NoiseStream stream(61, 0);
  const QuantumState rho = random_mixed_state(4, stream);
  EXPECT_EQ(success_probability(plan, rho), 1.0);
  const MultiqubitResult r = execute_plan(plan, rho, stream);
  EXPECT_TRUE(r.success);
  EXPECT_LE(max_abs_diff(r.restored->rho(), rho.rho()), 1e-12);
  for (double p : stepwise_probabilities(plan, rho).trace_ratio) EXPECT_EQ(p, 1.0);
}

TEST(Plan, InvariantsForRandomOperators) {
  for (std::size_t dim : {2u, 4u, 8u, 16u}) {
    for (std::uint64_t k = 0; k < 5; ++k) {
      const KrausOperator m = random_op(dim, dim * 10 + k);
      const StepPlan plan = build_plan(m, kGamma);
      ASSERT_EQ(plan.steps.size(), dim);
      const double pmin = plan.eigenvalues.front();
      std::size_t zero = 0;
      for (const PlanStep& s : plan.steps) {
        EXPECT_GE(s.duration, 0.0);
        EXPECT_GT(s.shrink, 0.0);
        EXPECT_LE(s.shrink, 1.0);
        EXPECT_NEAR(s.shrink, std::sqrt(pmin / plan.eigenvalues[s.index]), 1e-14);
        EXPECT_NEAR(s.duration, -2.0 / kGamma * std::log(s.shrink), 1e-14);
        EXPECT_LE(unitarity_defect(s.unitary), 1e-12);
        // U_i sends eigenvector i to the all-ones state.
        const CVector img = s.unitary * plan.basis.col(s.index);
        EXPECT_NEAR(std::abs(img[dim - 1]), 1.0, 1e-12);
        zero += s.duration == 0.0 ? 1 : 0;
      }
      EXPECT_GE(zero, 1u);
      EXPECT_LE(max_abs_diff(plan.operator_product(), plan.target_operator()), 1e-8);
      // The target is sqrt(p_min) E^{-1/2}.
      const CMatrix e = m.effect();
      const CMatrix check = plan.target_operator() * e * plan.target_operator();
      EXPECT_LE(max_abs_diff(check, CMatrix::identity(dim) * Complex(pmin)), 1e-10);
      // Full reversal operator times M is proportional to the identity.
      const CMatrix rev = plan.operator_product() * plan.measurement_unitary.adjoint() * m.matrix();
      EXPECT_LE(max_abs_diff(rev, CMatrix::identity(dim) * rev(0, 0)), 1e-8);
      EXPECT_NEAR(std::abs(rev(0, 0)), std::sqrt(pmin), 1e-10);
    }
  }
}

TEST(Plan, RejectsProjectorsAndLargeSystems) {
  const KrausOperator proj(CMatrix{{1.0, 0.0}, {0.0, 0.0}});
  EXPECT_THROW(build_plan(proj, kGamma), UncollapseImpossibleError);
  EXPECT_THROW(build_plan(random_op(2, 0), 0.0), ValidationError);
  EXPECT_THROW(build_plan(KrausOperator(CMatrix::identity(3)), kGamma), ValidationError);
  EXPECT_THROW(build_plan(KrausOperator(CMatrix::identity(128)), kGamma), ValidationError);
}

TEST(NullStep, ShrinksOnlyAllOnes) {
  EXPECT_LE(max_abs_diff(null_step_kraus(0.0, kGamma, 4).matrix(), CMatrix::identity(4)), 0.0);
  const CMatrix m = null_step_kraus(std::log(4.0) / kGamma, kGamma, 8).matrix();
  EXPECT_NEAR(m(7, 7).real(), 0.5, 1e-15);
  NoiseStream s(62, 0);
  CVector a = random_pure_amplitudes(8, s);
  CVector b = random_pure_amplitudes(8, s);
  a[7] = 0.0;
  b[7] = 0.0;
  EXPECT_NEAR(std::abs(inner(a, m * std::span<const Complex>(b)) - inner(a, b)), 0.0, 1e-15);
}

TEST(Probabilities, ProductAndDualForms) {
  for (std::size_t dim : {2u, 4u, 8u}) {
    NoiseStream s(63, dim);
    const StepPlan plan = build_plan(random_op(dim, 100 + dim), kGamma);
    const QuantumState rho = random_mixed_state(dim, s);
    const StepwiseProbabilities sp = stepwise_probabilities(plan, rho);
    ASSERT_EQ(sp.trace_ratio.size(), dim);
    double prod = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      EXPECT_NEAR(sp.trace_ratio[i], sp.normalized_state[i], 1e-12);
      prod *= sp.trace_ratio[i];
    }
    EXPECT_NEAR(prod, success_probability(plan, rho), 1e-12);
    double direct = 0.0;
    for (const PlanStep& st : plan.steps) {
      const CVector v = plan.basis.col(st.index);
      direct += (inner(v, rho.rho() * std::span<const Complex>(v))).real() * st.shrink * st.shrink;
    }
    EXPECT_NEAR(direct, success_probability(plan, rho), 1e-12);
  }
  // One qubit, p_t = 0.5, maximally mixed.
  const StepPlan one = build_plan(KrausOperator(null_kraus({0.5, 0.0})), kGamma);
  EXPECT_NEAR(success_probability(one, QuantumState::maximally_mixed(2)), 0.75, 1e-15);
}

TEST(Probabilities, JointSuccessIsStateIndependent) {
  const KrausOperator m = random_op(4, 7);
  const StepPlan plan = build_plan(m, kGamma);
  NoiseStream s(64, 0);
  for (int k = 0; k < 10; ++k) {
    const QuantumState rho = random_mixed_state(4, s);
    const MeasuredState measured = apply_measurement(m, rho);
    const double ps = success_probability(plan, prepare_input(plan, measured.state));
    EXPECT_NEAR(measured.probability * ps, plan.eigenvalues.front(), 1e-12);
    EXPECT_NEAR(ps, success_probability_bound(m, rho), 1e-12);
  }
}

TEST(Execute, RestoresEntangledStateAtBoundRate) {
  const KrausOperator m = random_op(4, 8);
  const StepPlan plan = build_plan(m, kGamma);
  NoiseStream prep(65, 0);
  const QuantumState rho = random_pure_state(4, prep);
  const QuantumState rotated = prepare_input(plan, apply_measurement(m, rho).state);
  const int n = 10000;
  std::uint64_t ok = 0;
  for (int i = 0; i < n; ++i) {
    NoiseStream s(66, i);
    const MultiqubitResult r = execute_plan(plan, rotated, s);
    if (r.success) {
      ++ok;
      ASSERT_GE(fidelity(*r.restored, rho), 1.0 - 1e-9);
    } else {
      ASSERT_GE(r.failed_step, 1u);
    }
  }
  EXPECT_TRUE(bernoulli_estimate(ok, n).contains(success_probability_bound(m, rho)));
}

TEST(Execute, OrderDoesNotMatter) {
  const KrausOperator m = random_op(8, 9);
  const StepPlan plan = build_plan(m, kGamma);
  NoiseStream prep(67, 0);
  const QuantumState rho = random_mixed_state(8, prep);
  const QuantumState rotated = prepare_input(plan, apply_measurement(m, rho).state);
  std::vector<std::size_t> order(8);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::swap(order[1], order[5]);
  const StepPlan other = permuted(plan, order);
  EXPECT_NEAR(success_probability(other, rotated), success_probability(plan, rotated), 1e-12);
  EXPECT_LE(max_abs_diff(other.operator_product(), plan.operator_product()), 1e-10);
  // Run until each order succeeds once and compare the outputs.
  for (const StepPlan* p : {&plan, &other}) {
    for (int i = 0;; ++i) {
      NoiseStream s(68, i);
      const MultiqubitResult r = execute_plan(*p, rotated, s);
      if (!r.success) continue;
      EXPECT_LE(max_abs_diff(r.restored->rho(), rho.rho()), 1e-9);
      break;
    }
  }
  const std::vector<std::size_t> bad{0, 0, 1, 2, 3, 4, 5, 6};
  EXPECT_THROW(permuted(plan, bad), ValidationError);
}

}  // namespace
}  // namespace qundo
