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

// Reversal of an N-qubit measurement with a detector that only responds to
// |11...1>: each eigen-direction of M^dagger M is rotated onto the all-ones
// state in turn and shrunk by a null-result measurement of suitable length.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qundo/matkernel.hpp"
#include "qundo/qmeas.hpp"
#include "qundo/rng.hpp"

namespace qundo {

constexpr std::size_t kMaxQubits = 6;

struct PlanStep {
  std::size_t index = 0;  // eigen-direction handled by this step
  CMatrix unitary;        // maps eigenvector `index` to |11...1>
  double duration = 0.0;
  double shrink = 1.0;    // exp(-gamma duration / 2)
};

struct StepPlan {
  std::size_t dim = 0;
  double gamma = 0.0;
  CMatrix basis;                    // eigenvectors of M^dagger M
  std::vector<double> eigenvalues;  // ascending
  CMatrix measurement_unitary;      // U_m of M = U_m sqrt(M^dagger M)
  std::vector<PlanStep> steps;

  /// Product of the step operators, in plan order.
  CMatrix operator_product() const;
  /// sqrt(p_min) (M^dagger M)^{-1/2}.
  CMatrix target_operator() const;
};

StepPlan build_plan(const KrausOperator& m, double gamma);

/// Same steps in a different order.
StepPlan permuted(const StepPlan& plan, std::span<const std::size_t> order);

/// Null-result operator of a detector run of length t: shrinks |11...1>.
KrausOperator null_step_kraus(double t, double gamma, std::size_t dim);

/// U_m^dagger rho_m U_m, the state on which the steps act.
QuantumState prepare_input(const StepPlan& plan, const QuantumState& measured);

struct MultiqubitResult {
  bool success = false;
  std::size_t failed_step = 0;  // 1-based position in plan order; 0 on success
  std::optional<QuantumState> restored;
};

MultiqubitResult execute_plan(const StepPlan& plan, const QuantumState& rotated, NoiseStream& stream);

double success_probability(const StepPlan& plan, const QuantumState& rotated);

struct StepwiseProbabilities {
  std::vector<double> trace_ratio;       // Tr(L_i..L_1 rho ...)/Tr(L_{i-1}..L_1 rho ...)
  std::vector<double> normalized_state;  // 1 - (1 - e^{-gamma t_i}) <1..1|U_i rho_{i-1} U_i^dagger|1..1>
};

StepwiseProbabilities stepwise_probabilities(const StepPlan& plan, const QuantumState& rotated);

}  // namespace qundo
