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

#include "qundo/qmeas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

constexpr double kStateTol = 1e-10;
constexpr double kPurityTol = 1e-8;
constexpr double kEffectTol = 1e-10;
constexpr double kCompletenessTol = 1e-9;
constexpr double kImpossibleProbability = 1e-14;
constexpr double kProjectiveThreshold = 1e-12;
constexpr double kPriorTol = 1e-12;

void require_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

CMatrix sandwich(const CMatrix& a, const CMatrix& rho) { return a * rho * a.adjoint(); }

double real_trace_product(const CMatrix& a, const CMatrix& b) {
  // Re Tr(A B) without forming the product.
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += (a(i, k) * b(k, i)).real();
  return t;
}

}  // namespace

QuantumState::QuantumState(CMatrix rho, bool pure) : rho_(std::move(rho)), pure_(pure) {
  if (!rho_.square() || rho_.empty()) throw ValidationError("QuantumState: density matrix must be square");
  if (!rho_.all_finite()) throw ValidationError("QuantumState: non-finite entry");
  const double herm = hermiticity_defect(rho_);
  if (herm > kStateTol) {
    throw ValidationError("QuantumState: not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const Complex tr = rho_.trace();
  if (std::abs(tr - 1.0) > kStateTol) {
    throw ValidationError("QuantumState: trace " + std::to_string(tr.real()) + " != 1");
  }
  const std::vector<double> ev = herm_eig(rho_).values;
  if (ev.front() < -kStateTol) {
    throw ValidationError("QuantumState: negative eigenvalue " + std::to_string(ev.front()));
  }
  if (pure_ && std::abs(purity() - 1.0) > kPurityTol) {
    throw ValidationError("QuantumState: flagged pure but Tr(rho^2) = " + std::to_string(purity()));
  }
}

QuantumState QuantumState::from_pure(std::span<const Complex> amplitudes) {
  const double n = norm(amplitudes);
  if (std::abs(n - 1.0) > kStateTol) {
    throw ValidationError("QuantumState::from_pure: amplitude norm " + std::to_string(n) + " != 1");
  }
  return QuantumState(CMatrix::outer(amplitudes, amplitudes), true);
}

QuantumState QuantumState::maximally_mixed(std::size_t dim) {
  CMatrix rho = CMatrix::identity(dim);
  rho *= 1.0 / static_cast<double>(dim);
  return QuantumState(std::move(rho), dim == 1);
}

QuantumState QuantumState::qubit_diagonal(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ValidationError("qubit_diagonal: population outside [0, 1]");
  const double d[2] = {p1, 1.0 - p1};
  return QuantumState(CMatrix::diagonal(std::span<const double>(d, 2)), p1 == 0.0 || p1 == 1.0);
}

double QuantumState::purity() const { return real_trace_product(rho_, rho_); }

double fidelity(const QuantumState& a, const QuantumState& b) {
  require_dims(a.dim(), b.dim(), "fidelity");
  if (a.is_pure() || b.is_pure()) return real_trace_product(a.rho(), b.rho());
  const CMatrix sa = herm_function(a.rho(), [](double x) { return std::sqrt(std::max(x, 0.0)); });
  const CMatrix inner_m = hermitian_part(sa * b.rho() * sa);
  const std::vector<double> ev = herm_eig(inner_m).values;
  double s = 0.0;
  for (double x : ev) s += std::sqrt(std::max(x, 0.0));
  return s * s;
}

KrausOperator::KrausOperator(CMatrix m, std::string label) : m_(std::move(m)), label_(std::move(label)) {
  if (!m_.square() || m_.empty()) throw ValidationError("KrausOperator: matrix must be square");
  if (!m_.all_finite()) throw ValidationError("KrausOperator: non-finite entry");
  const std::vector<double> ev = effect_eigenvalues();
  if (ev.back() > 1.0 + kEffectTol) {
    throw ValidationError("KrausOperator '" + label_ + "': effect eigenvalue " +
                          std::to_string(ev.back()) + " exceeds 1");
  }
}

CMatrix KrausOperator::effect() const { return hermitian_part(m_.adjoint() * m_); }

std::vector<double> KrausOperator::effect_eigenvalues() const {
  std::vector<double> ev = herm_eig(effect()).values;
  for (double& x : ev) x = std::max(x, 0.0);
  return ev;
}

PovmSet::PovmSet(std::vector<PovmElement> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("PovmSet: no elements");
  const std::size_t d = elements_.front().effect.rows();
  for (const PovmElement& e : elements_) {
    if (!e.effect.square() || e.effect.rows() != d) throw ValidationError("PovmSet: effect dimension mismatch");
    if (e.kraus && max_abs_diff(e.kraus->effect(), e.effect) > kEffectTol) {
      throw ValidationError("PovmSet: effect of '" + e.label + "' does not match its Kraus operator");
    }
    const std::vector<double> ev = herm_eig(e.effect).values;
    if (ev.front() < -kEffectTol || ev.back() > 1.0 + kEffectTol) {
      throw ValidationError("PovmSet: effect '" + e.label + "' has eigenvalues outside [0, 1]");
    }
  }
  const double defect = completeness_defect();
  if (defect > kCompletenessTol) {
    throw ValidationError("PovmSet: completeness violated by " + std::to_string(defect));
  }
}

PovmSet PovmSet::from_kraus(std::vector<KrausOperator> ops) {
  std::vector<PovmElement> elements;
  elements.reserve(ops.size());
  for (KrausOperator& op : ops) {
    CMatrix e = op.effect();
    std::string label = op.label();
    elements.push_back(PovmElement{std::move(label), std::move(e), std::move(op)});
  }
  return PovmSet(std::move(elements));
}

double PovmSet::completeness_defect() const {
  CMatrix sum(dim(), dim());
  for (const PovmElement& e : elements_) sum += e.effect;
  return max_abs_diff(sum, CMatrix::identity(dim()));
}

PriorEnsemble::PriorEnsemble(std::vector<QuantumState> states, std::vector<double> weights)
    : states_(std::move(states)), weights_(std::move(weights)) {
  if (states_.empty() || states_.size() != weights_.size()) {
    throw ValidationError("PriorEnsemble: need one weight per state and at least one state");
  }
  for (const QuantumState& s : states_) require_dims(s.dim(), states_.front().dim(), "PriorEnsemble");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ValidationError("PriorEnsemble: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kPriorTol) {
    throw ValidationError("PriorEnsemble: weights sum to " + std::to_string(total));
  }
}

QuantumState PriorEnsemble::averaged_state() const {
  CMatrix avg(states_.front().dim(), states_.front().dim());
  for (std::size_t k = 0; k < states_.size(); ++k) avg += states_[k].rho() * weights_[k];
  return QuantumState(hermitian_part(avg), states_.size() == 1 && states_.front().is_pure());
}

QuantumState normalize_state(const CMatrix& rho, bool pure) {
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw ImpossibleOutcomeError("normalize_state: zero trace");
  CMatrix out = hermitian_part(rho);
  out *= 1.0 / tr;
  return QuantumState(std::move(out), pure);
}

QuantumState transform_state(const CMatrix& a, const QuantumState& rho) {
  require_dims(a.cols(), rho.dim(), "transform_state");
  const CMatrix out = sandwich(a, rho.rho());
  const double tr = out.trace().real();
  if (!(tr > kImpossibleProbability * a.max_abs() * a.max_abs())) {
    throw ImpossibleOutcomeError("transform_state: trace " + std::to_string(tr));
  }
  return normalize_state(out, rho.is_pure());
}

double outcome_probability(const KrausOperator& m, const QuantumState& rho) {
  require_dims(m.dim(), rho.dim(), "outcome_probability");
  return real_trace_product(m.effect(), rho.rho());
}

MeasuredState apply_measurement(const KrausOperator& m, const QuantumState& rho) {
  const double p = outcome_probability(m, rho);
  if (p <= kImpossibleProbability) {
    throw ImpossibleOutcomeError("apply_measurement: outcome '" + m.label() +
                                 "' has probability " + std::to_string(p));
  }
  CMatrix out = sandwich(m.matrix(), rho.rho());
  out *= 1.0 / p;
  return MeasuredState{QuantumState(hermitian_part(out), rho.is_pure()), p};
}

PolarDecomposition polar_decompose(const KrausOperator& m) {
  const Svd s = svd(m.matrix());
  PolarDecomposition out;
  const CMatrix sigma = CMatrix::diagonal(std::span<const double>(s.sigma));
  out.sqrt_effect = hermitian_part(s.v.adjoint() * sigma * s.v);
  out.unitary = s.u * s.v;
  out.singular = std::any_of(s.sigma.begin(), s.sigma.end(), [](double x) { return x == 0.0; });
  return out;
}

UncollapseOperator build_uncollapse(const KrausOperator& m,
                                    const std::optional<CMatrix>& subspace_projector) {
  const std::size_t d = m.dim();
  UncollapseOperator op;
  if (!subspace_projector) {
    const HermEig e = herm_eig(m.effect());
    const double p_min = e.values.front();
    if (p_min <= kProjectiveThreshold) {
      throw UncollapseImpossibleError("build_uncollapse: minimum effect eigenvalue " +
                                      std::to_string(p_min) + " (projective measurement)");
    }
    const PolarDecomposition polar = polar_decompose(m);
    std::vector<double> diag(d);
    for (std::size_t i = 0; i < d; ++i) diag[i] = std::sqrt(p_min / e.values[i]);
    op.magnitude = std::sqrt(p_min);
    op.l = CMatrix::diagonal(std::span<const double>(diag));
    op.v_l = e.vectors;
    op.u_l = e.vectors.adjoint();
    op.pre_rotation = op.v_l.adjoint() * polar.unitary.adjoint();
    op.post_rotation = op.u_l.adjoint();
    return op;
  }

  const CMatrix& proj = *subspace_projector;
  require_dims(proj.rows(), d, "build_uncollapse");
  if (max_abs_diff(proj * proj, proj) > 1e-9 || hermiticity_defect(proj) > 1e-9) {
    throw ValidationError("build_uncollapse: subspace argument is not an orthogonal projector");
  }
  const HermEig pe = herm_eig(proj);
  std::vector<CVector> basis;
  for (std::size_t k = 0; k < d; ++k)
    if (pe.values[k] > 0.5) basis.push_back(pe.vectors.col(k));
  if (basis.empty()) throw ValidationError("build_uncollapse: empty subspace");
  const std::size_t k = basis.size();
  CMatrix q(d, k);
  for (std::size_t j = 0; j < k; ++j) q.set_col(j, basis[j]);
  const CMatrix image = m.matrix() * q;
  const HermEig ke = herm_eig(hermitian_part(image.adjoint() * image));
  const double p_min = ke.values.front();
  if (p_min <= kProjectiveThreshold) {
    throw UncollapseImpossibleError("build_uncollapse: measurement is projective on the subspace");
  }
  const double c = std::sqrt(p_min);
  CMatrix l(d, d);
  for (std::size_t j = 0; j < k; ++j) {
    const CVector z = ke.vectors.col(j);
    const double s = std::sqrt(ke.values[j]);
    CVector y = image * std::span<const Complex>(z);
    for (Complex& x : y) x /= s;
    const CVector qz = q * std::span<const Complex>(z);
    l += CMatrix::outer(qz, y) * Complex(c / s);
  }
  op.magnitude = c;
  op.l = std::move(l);
  op.u_l = CMatrix::identity(d);
  op.v_l = CMatrix::identity(d);
  op.pre_rotation = CMatrix::identity(d);
  op.post_rotation = CMatrix::identity(d);
  return op;
}

MeasuredState apply_uncollapse(const UncollapseOperator& op, const QuantumState& measured) {
  require_dims(op.l.rows(), measured.dim(), "apply_uncollapse");
  const CMatrix rotated = sandwich(op.pre_rotation, measured.rho());
  const CMatrix lhl = op.l.adjoint() * op.l;
  const double p = real_trace_product(lhl, rotated);
  if (p <= kImpossibleProbability) {
    throw ImpossibleOutcomeError("apply_uncollapse: success probability " + std::to_string(p));
  }
  CMatrix out = sandwich(op.post_rotation * op.l, rotated);
  out *= 1.0 / p;
  return MeasuredState{QuantumState(hermitian_part(out), measured.is_pure()), p};
}

double success_probability_bound(const KrausOperator& m, const QuantumState& rho_in) {
  const double p = outcome_probability(m, rho_in);
  if (p <= kImpossibleProbability) {
    throw ImpossibleOutcomeError("success_probability_bound: outcome '" + m.label() +
                                 "' impossible for this state");
  }
  const double p_min = m.effect_eigenvalues().front();
  return std::clamp(p_min / p, 0.0, 1.0);
}

double joint_success_probability(const KrausOperator& m) { return m.effect_eigenvalues().front(); }

double irreversibility_measure(const PovmSet& povm) {
  double reversible = 0.0;
  for (const PovmElement& e : povm.elements()) {
    reversible += std::max(0.0, herm_eig(e.effect).values.front());
  }
  return std::clamp(1.0 - reversible, 0.0, 1.0);
}

PriorEnsemble bayes_update(const PriorEnsemble& prior, const KrausOperator& m) {
  std::vector<double> w(prior.size());
  double z = 0.0;
  for (std::size_t k = 0; k < prior.size(); ++k) {
    w[k] = outcome_probability(m, prior.states()[k]) * prior.weights()[k];
    z += w[k];
  }
  if (!(z > 0.0)) throw ImpossibleOutcomeError("bayes_update: outcome impossible for every candidate");
  for (double& x : w) x /= z;
  return PriorEnsemble(prior.states(), std::move(w));
}

PriorEnsemble pair_update(const PriorEnsemble& prior, const KrausOperator& m,
                          const UncollapseOperator& op) {
  const PriorEnsemble posterior = bayes_update(prior, m);
  std::vector<double> w(prior.size(), 0.0);
  double z = 0.0;
  for (std::size_t k = 0; k < prior.size(); ++k) {
    if (posterior.weights()[k] == 0.0) continue;
    const MeasuredState measured = apply_measurement(m, prior.states()[k]);
    w[k] = apply_uncollapse(op, measured.state).probability * posterior.weights()[k];
    z += w[k];
  }
  if (!(z > 0.0)) throw ImpossibleOutcomeError("pair_update: reversal impossible for every candidate");
  for (double& x : w) x /= z;
  return PriorEnsemble(prior.states(), std::move(w));
}

}  // namespace qundo
