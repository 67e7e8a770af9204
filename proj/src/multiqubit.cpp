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
#include <string>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

constexpr double kProjectiveThreshold = 1e-12;

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

CMatrix sandwich(const CMatrix& a, const CMatrix& rho) { return a * rho * a.adjoint(); }

// Step operator U^dagger N U, N shrinking the last basis state.
CMatrix step_operator(const PlanStep& s, std::size_t dim) {
  std::vector<double> d(dim, 1.0);
  d.back() = s.shrink;
  return s.unitary.adjoint() * CMatrix::diagonal(std::span<const double>(d)) * s.unitary;
}

double last_population(const CMatrix& rho) { return rho(rho.rows() - 1, rho.cols() - 1).real(); }

void require_plan_state(const StepPlan& plan, const QuantumState& s, const char* what) {
  if (s.dim() != plan.dim) throw ValidationError(std::string(what) + ": dimension mismatch");
}

}  // namespace

CMatrix StepPlan::operator_product() const {
  CMatrix out = CMatrix::identity(dim);
  for (const PlanStep& s : steps) out = step_operator(s, dim) * out;
  return out;
}

CMatrix StepPlan::target_operator() const {
  std::vector<double> l(dim);
  for (std::size_t i = 0; i < dim; ++i) l[i] = std::sqrt(eigenvalues.front() / eigenvalues[i]);
  return basis * CMatrix::diagonal(std::span<const double>(l)) * basis.adjoint();
}

StepPlan build_plan(const KrausOperator& m, double gamma) {
  const std::size_t dim = m.dim();
  if (!power_of_two(dim) || dim > (std::size_t{1} << kMaxQubits)) {
    throw ValidationError("build_plan: dimension must be 2^N with 1 <= N <= 6");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("build_plan: gamma must be positive");
  const HermEig eig = herm_eig(m.effect());
  const double p_min = eig.values.front();
  if (!(p_min > kProjectiveThreshold)) {
    throw UncollapseImpossibleError("build_plan: minimum eigenvalue " + std::to_string(p_min));
  }
  StepPlan plan;
  plan.dim = dim;
  plan.gamma = gamma;
  plan.basis = eig.vectors;
  plan.eigenvalues = eig.values;
  plan.measurement_unitary = polar_decompose(m).unitary;
  const CMatrix w_dag = eig.vectors.adjoint();
  for (std::size_t i = 0; i < dim; ++i) {
    PlanStep s;
    s.index = i;
    s.unitary = basis_to_all_ones(i, dim) * w_dag;
    s.shrink = std::min(1.0, std::sqrt(p_min / eig.values[i]));
    s.duration = std::max(0.0, -2.0 / gamma * std::log(s.shrink));
    plan.steps.push_back(std::move(s));
  }
  return plan;
}

StepPlan permuted(const StepPlan& plan, std::span<const std::size_t> order) {
  if (order.size() != plan.steps.size()) throw ValidationError("permuted: order has wrong length");
  std::vector<bool> seen(order.size(), false);
  StepPlan out = plan;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= order.size() || seen[order[k]]) throw ValidationError("permuted: not a permutation");
    seen[order[k]] = true;
    out.steps[k] = plan.steps[order[k]];
  }
  return out;
}

KrausOperator null_step_kraus(double t, double gamma, std::size_t dim) {
  if (!(t >= 0.0) || !(gamma > 0.0)) throw ValidationError("null_step_kraus: need t >= 0, gamma > 0");
  if (!power_of_two(dim)) throw ValidationError("null_step_kraus: dimension must be 2^N");
  std::vector<double> d(dim, 1.0);
  d.back() = std::exp(-0.5 * gamma * t);
  return KrausOperator(CMatrix::diagonal(std::span<const double>(d)), "null");
}

QuantumState prepare_input(const StepPlan& plan, const QuantumState& measured) {
  require_plan_state(plan, measured, "prepare_input");
  return transform_state(plan.measurement_unitary.adjoint(), measured);
}

MultiqubitResult execute_plan(const StepPlan& plan, const QuantumState& rotated, NoiseStream& stream) {
  require_plan_state(plan, rotated, "execute_plan");
  MultiqubitResult out;
  CMatrix rho = rotated.rho();
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const PlanStep& s = plan.steps[k];
    CMatrix turned = sandwich(s.unitary, rho);
    const double p_tunnel = -std::expm1(-plan.gamma * s.duration) * last_population(turned);
    if (stream.uniform() < p_tunnel) {
      out.failed_step = k + 1;
      return out;
    }
    // Null result: scale the last row and column, then renormalize.
    const std::size_t n = plan.dim - 1;
    for (std::size_t j = 0; j < plan.dim; ++j) {
      turned(n, j) *= s.shrink;
      turned(j, n) *= s.shrink;
    }
    turned *= 1.0 / turned.trace().real();
    rho = sandwich(s.unitary.adjoint(), turned);
  }
  out.success = true;
  out.restored = normalize_state(rho, rotated.is_pure());
  return out;
}

double success_probability(const StepPlan& plan, const QuantumState& rotated) {
  require_plan_state(plan, rotated, "success_probability");
  const CMatrix in_basis = sandwich(plan.basis.adjoint(), rotated.rho());
  double p = 0.0;
  for (const PlanStep& s : plan.steps) p += in_basis(s.index, s.index).real() * std::exp(-plan.gamma * s.duration);
  return p;
}

StepwiseProbabilities stepwise_probabilities(const StepPlan& plan, const QuantumState& rotated) {
  require_plan_state(plan, rotated, "stepwise_probabilities");
  StepwiseProbabilities out;
  CMatrix unnormalized = rotated.rho();
  CMatrix normalized = rotated.rho();
  for (const PlanStep& s : plan.steps) {
    const CMatrix op = step_operator(s, plan.dim);
    const double before = unnormalized.trace().real();
    unnormalized = sandwich(op, unnormalized);
    out.trace_ratio.push_back(unnormalized.trace().real() / before);

    const double all_ones = last_population(sandwich(s.unitary, normalized));
    const double p = 1.0 - (-std::expm1(-plan.gamma * s.duration)) * all_ones;
    out.normalized_state.push_back(p);
    normalized = sandwich(op, normalized);
    normalized *= 1.0 / p;
  }
  return out;
}

}  // namespace qundo
