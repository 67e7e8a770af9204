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

#include <algorithm>
#include <cmath>
#include <string>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

constexpr double kImpossibleRatio = 1e-12;
constexpr double kDegenerateRatio = 1e-12;
constexpr double kOrthogonalityTol = 1e-6;

void require_qubit(const QuantumState& s, const char* what) {
  if (s.dim() != 2) throw ValidationError(std::string(what) + ": qubit state required");
}

// Largest-magnitude component of every column made real and positive.
void fix_column_phases(CMatrix& u) {
  for (std::size_t c = 0; c < u.cols(); ++c) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < u.rows(); ++r) {
      if (std::abs(u(r, c)) > std::abs(u(best, c))) best = r;
    }
    const Complex phase = std::conj(u(best, c)) / std::abs(u(best, c));
    for (std::size_t r = 0; r < u.rows(); ++r) u(r, c) *= phase;
    u(best, c) = std::abs(u(best, c));
  }
}

// Rows a^dagger and its orthogonal complement.
CMatrix rotation_to_basis(std::span<const Complex> a) {
  const CVector h = normalized(a);
  return CMatrix{{std::conj(h[0]), std::conj(h[1])}, {-h[1], h[0]}};
}

}  // namespace

CMatrix qnd_kraus(double r) {
  const double a = std::abs(r);
  return CMatrix{{std::exp(0.5 * r - 0.5 * a), 0.0}, {0.0, std::exp(-0.5 * r - 0.5 * a)}};
}

double qnd_stretch_probability(const QuantumState& rho, double r) {
  require_qubit(rho, "qnd_stretch_probability");
  const double a = std::abs(r);
  return rho.population(0) * std::exp(r - a) + rho.population(1) * std::exp(-r - a);
}

CMatrix UncollapsePlan::l() const { return qnd_kraus(target); }

UncollapsePlan plan_from_kraus(const KrausExtraction& k, SvdOrdering ordering) {
  if (k.m.rows() != 2 || k.m.cols() != 2) throw ValidationError("plan_from_kraus: 2x2 operator required");
  if (!(k.lambda_plus > 0.0)) throw UncollapseImpossibleError("plan_from_kraus: zero operator");
  const double ratio = k.lambda_minus / k.lambda_plus;
  if (!(ratio > kImpossibleRatio)) {
    throw UncollapseImpossibleError("plan_from_kraus: lambda_-/lambda_+ = " + std::to_string(ratio));
  }
  CMatrix mn = k.m;
  mn *= 1.0 / std::sqrt(k.lambda_plus);

  UncollapsePlan plan;
  plan.ordering = ordering;
  plan.lambda_plus = k.lambda_plus;
  plan.lambda_minus = k.lambda_minus;
  plan.magnitude = std::sqrt(k.lambda_minus);
  if (1.0 - ratio <= kDegenerateRatio) {
    plan.u = CMatrix::identity(2);
    plan.target = 0.0;
  } else {
    const HermEig eig = herm_eig(hermitian_part(mn.adjoint() * mn));
    plan.u = eig.vectors;  // ascending: (lambda_-, lambda_+)
    if (ordering == SvdOrdering::kPlusFirst) {
      const CVector c0 = plan.u.col(0);
      plan.u.set_col(0, plan.u.col(1));
      plan.u.set_col(1, c0);
    }
    fix_column_phases(plan.u);
    const double r1 = 0.5 * std::log(k.lambda_plus / k.lambda_minus);
    plan.target = ordering == SvdOrdering::kMinusFirst ? r1 : -r1;
  }
  // V = sqrt(ratio) L^{-1} U^dagger Mn^{-1}; unitary since Mn = W diag U^dagger.
  const CMatrix l_inv = inverse(plan.l());
  plan.v = l_inv * plan.u.adjoint() * inverse(mn);
  plan.v *= std::sqrt(ratio);
  return plan;
}

PlanResult execute_plan(const UncollapsePlan& plan, const QuantumState& measured,
                        const TrajectoryConfig& config, NoiseStream& stream) {
  require_qubit(measured, "execute_plan");
  const QuantumState rotated = transform_state(plan.v, measured);
  const StretchResult stretch = qnd_stretch(rotated, plan.target, config, stream);
  PlanResult out;
  out.waiting_time = stretch.waiting_time;
  if (stretch.success) {
    out.success = true;
    out.restored = transform_state(plan.u, *stretch.state);
  }
  return out;
}

double success_bound(const KrausExtraction& k, const QuantumState& rho_in) {
  require_qubit(rho_in, "success_bound");
  const CMatrix& r = rho_in.rho();
  const double n1 = std::norm(k.v1[0]) + std::norm(k.v1[1]);
  const double n2 = std::norm(k.v2[0]) + std::norm(k.v2[1]);
  const Complex cross = inner(k.v2, k.v1);
  const double den = r(0, 0).real() * n1 + r(1, 1).real() * n2 + 2.0 * (r(0, 1) * cross).real();
  if (!(den > 0.0)) throw ImpossibleOutcomeError("success_bound: outcome impossible for this state");
  return std::min(1.0, k.lambda_minus / den);
}

double plan_success_probability(const UncollapsePlan& plan, const QuantumState& measured) {
  return qnd_stretch_probability(transform_state(plan.v, measured), plan.target);
}

TwoStepPlan plan_two_step(const KrausExtraction& k, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("plan_two_step: c must be positive");
  if (!(k.lambda_plus > 0.0) || !(k.lambda_minus / k.lambda_plus > kImpossibleRatio)) {
    throw UncollapseImpossibleError("plan_two_step: operator not invertible");
  }
  const double scale = 1.0 / std::sqrt(k.lambda_plus);
  CVector v1 = k.v1;
  CVector v2 = k.v2;
  for (Complex& z : v1) z *= scale;
  for (Complex& z : v2) z *= scale;

  TwoStepPlan plan;
  plan.axis_parameter = c;
  const Complex g = inner(v2, v1);
  if (std::abs(g) <= kOrthogonalityTol * norm(v1) * norm(v2)) {
    plan.first_rotation = CMatrix::identity(2);
    plan.first_target = 0.0;
  } else {
    const Complex phase = g / std::abs(g);
    CVector axis(2);
    for (int i = 0; i < 2; ++i) axis[i] = v1[i] + c * phase * v2[i];
    plan.first_rotation = rotation_to_basis(axis);
    const CVector p1 = plan.first_rotation * std::span<const Complex>(v1);
    const CVector p2 = plan.first_rotation * std::span<const Complex>(v2);
    const Complex ratio = -std::conj(p2[1]) * p1[1] / (std::conj(p2[0]) * p1[0]);
    if (!(ratio.real() > 0.0) || std::abs(ratio.imag()) > 1e-8 * std::abs(ratio)) {
      throw NumericError("plan_two_step: axis does not admit an orthogonalizing stretch");
    }
    plan.first_target = 0.5 * std::log(ratio.real());
  }
  const CMatrix n1 = qnd_kraus(plan.first_target) * plan.first_rotation;
  const CVector w1 = n1 * std::span<const Complex>(v1);
  const CVector w2 = n1 * std::span<const Complex>(v2);
  const double nw1 = norm(w1);
  const double nw2 = norm(w2);
  if (std::abs(inner(w1, w2)) > kOrthogonalityTol * nw1 * nw2) {
    throw NumericError("plan_two_step: images not orthogonal after the first stage");
  }
  plan.second_rotation = rotation_to_basis(w1);
  plan.second_target = std::log(nw2 / nw1);

  CMatrix nm = qnd_kraus(plan.second_target) * plan.second_rotation * n1 * (k.m * Complex(scale));
  nm *= 1.0 / norm(nm.col(0));
  plan.final_unitary = nm.adjoint();
  return plan;
}

double two_step_success_probability(const TwoStepPlan& plan, const QuantumState& measured) {
  require_qubit(measured, "two_step_success_probability");
  const QuantumState s1 = transform_state(plan.first_rotation, measured);
  const double p1 = qnd_stretch_probability(s1, plan.first_target);
  const QuantumState s2 =
      transform_state(plan.second_rotation * qnd_kraus(plan.first_target), s1);
  return p1 * qnd_stretch_probability(s2, plan.second_target);
}

TwoStepResult execute_two_step(const TwoStepPlan& plan, const QuantumState& measured,
                               const TrajectoryConfig& config, NoiseStream& stream) {
  require_qubit(measured, "execute_two_step");
  TwoStepResult out;
  const StretchResult first =
      qnd_stretch(transform_state(plan.first_rotation, measured), plan.first_target, config, stream);
  out.waiting_time = first.waiting_time;
  if (!first.success) {
    out.failed_stage = 1;
    return out;
  }
  const StretchResult second = qnd_stretch(transform_state(plan.second_rotation, *first.state),
                                           plan.second_target, config, stream);
  out.waiting_time += second.waiting_time;
  if (!second.success) {
    out.failed_stage = 2;
    return out;
  }
  out.success = true;
  out.restored = transform_state(plan.final_unitary, *second.state);
  return out;
}

TwoStepResult two_step_uncollapse(const KrausExtraction& k, const QuantumState& measured, double c,
                                  const TrajectoryConfig& config, NoiseStream& stream) {
  return execute_two_step(plan_two_step(k, c), measured, config, stream);
}

}  // namespace qundo
