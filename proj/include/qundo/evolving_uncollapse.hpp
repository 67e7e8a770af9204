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

// Reversal of an evolving-qubit measurement: a unitary, a QND measurement
// stopped at a preset result, and a second unitary; plus a two-measurement
// variant that is exact but not optimal.

#include <optional>

#include "qundo/matkernel.hpp"
#include "qundo/qmeas.hpp"
#include "qundo/trajectory.hpp"

namespace qundo {

enum class SvdOrdering {
  kMinusFirst = 1,  // U columns (lambda_-, lambda_+); positive target
  kPlusFirst = 2,   // U columns (lambda_+, lambda_-); negative target
};

struct UncollapsePlan {
  CMatrix v;  // applied first
  CMatrix u;  // applied last; columns are eigenvectors of M^dagger M
  double target = 0.0;
  SvdOrdering ordering = SvdOrdering::kMinusFirst;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double magnitude = 0.0;  // C with u * l() * v = C M^{-1}

  /// diag(e^{target/2}, e^{-target/2}) scaled so that its largest entry is 1.
  CMatrix l() const;
};

/// Kraus operator of a QND measurement stopped at result r, largest entry 1.
CMatrix qnd_kraus(double r);

/// Probability that a QND measurement of rho ever reaches result r.
double qnd_stretch_probability(const QuantumState& rho, double r);

UncollapsePlan plan_from_kraus(const KrausExtraction& k,
                               SvdOrdering ordering = SvdOrdering::kMinusFirst);

struct PlanResult {
  bool success = false;
  double waiting_time = 0.0;
  std::optional<QuantumState> restored;
};

PlanResult execute_plan(const UncollapsePlan& plan, const QuantumState& measured,
                        const TrajectoryConfig& config, NoiseStream& stream);

/// Success probability of the optimal plan for a given initial state.
double success_bound(const KrausExtraction& k, const QuantumState& rho_in);

/// Exact success probability of executing `plan` on `measured`.
double plan_success_probability(const UncollapsePlan& plan, const QuantumState& measured);

struct TwoStepPlan {
  CMatrix first_rotation;
  double first_target = 0.0;
  CMatrix second_rotation;
  double second_target = 0.0;
  CMatrix final_unitary;
  double axis_parameter = 0.0;
};

TwoStepPlan plan_two_step(const KrausExtraction& k, double c);

/// Product of the two stage probabilities for `measured`.
double two_step_success_probability(const TwoStepPlan& plan, const QuantumState& measured);

struct TwoStepResult {
  bool success = false;
  int failed_stage = 0;  // 0 on success
  double waiting_time = 0.0;
  std::optional<QuantumState> restored;
};

TwoStepResult two_step_uncollapse(const KrausExtraction& k, const QuantumState& measured, double c,
                                  const TrajectoryConfig& config, NoiseStream& stream);

TwoStepResult execute_two_step(const TwoStepPlan& plan, const QuantumState& measured,
                               const TrajectoryConfig& config, NoiseStream& stream);

}  // namespace qundo
