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

// Ideal generalized measurements: Kraus operators, POVMs, the optimal
// uncollapse operator and the probability bookkeeping around it.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qundo/matkernel.hpp"

namespace qundo {

/// Density matrix with validated invariants: Hermitian and unit trace within
/// 1e-10, eigenvalues >= -1e-10, and Tr(rho^2) = 1 within 1e-8 when flagged
/// pure.
class QuantumState {
 public:
  explicit QuantumState(CMatrix rho, bool pure = false);

  /// |psi><psi| from a normalized amplitude vector (norm within 1e-10 of one).
  static QuantumState from_pure(std::span<const Complex> amplitudes);
  static QuantumState maximally_mixed(std::size_t dim);
  /// diag(p, 1-p) on a qubit.
  static QuantumState qubit_diagonal(double p1);

  const CMatrix& rho() const { return rho_; }
  std::size_t dim() const { return rho_.rows(); }
  bool is_pure() const { return pure_; }
  double purity() const;
  double population(std::size_t i) const { return rho_(i, i).real(); }

 private:
  CMatrix rho_;
  bool pure_ = false;
};

/// Uhlmann fidelity specialised to the cases used here: exact when at least
/// one argument is pure, Tr(sqrt(sqrt(a) b sqrt(a)))^2 otherwise.
double fidelity(const QuantumState& a, const QuantumState& b);

/// Measurement operator M_m for one outcome. The effect M^dagger M must have
/// all eigenvalues in [0, 1 + 1e-10].
class KrausOperator {
 public:
  explicit KrausOperator(CMatrix m, std::string label = "m");

  const CMatrix& matrix() const { return m_; }
  const std::string& label() const { return label_; }
  std::size_t dim() const { return m_.rows(); }
  /// E_m = M^dagger M
  CMatrix effect() const;
  /// Eigenvalues of E_m, ascending.
  std::vector<double> effect_eigenvalues() const;

 private:
  CMatrix m_;
  std::string label_;
};

struct PovmElement {
  std::string label;
  CMatrix effect;
  std::optional<KrausOperator> kraus;  // absent when no Kraus operator exists
};

/// Complete set of POVM elements: sum of effects equals the identity within 1e-9.
class PovmSet {
 public:
  explicit PovmSet(std::vector<PovmElement> elements);
  static PovmSet from_kraus(std::vector<KrausOperator> ops);

  const std::vector<PovmElement>& elements() const { return elements_; }
  std::size_t dim() const { return elements_.front().effect.rows(); }
  /// max |sum E_m - 1|
  double completeness_defect() const;

 private:
  std::vector<PovmElement> elements_;
};

struct PolarDecomposition {
  CMatrix unitary;      // U_m
  CMatrix sqrt_effect;  // (M^dagger M)^{1/2}
  bool singular = false;  // U_m was completed arbitrarily on the null space
};

/// Reversal operator L = C U_L E^{-1/2} V_L together with the rotations that
/// surround it. With the full-space default, V_L holds the eigenvectors of
/// E_m and U_L = V_L^dagger, so L is diagonal in the canonical basis with
/// entries sqrt(p_min / p_i). C is real and positive.
struct UncollapseOperator {
  CMatrix l;
  CMatrix u_l;
  CMatrix v_l;
  CMatrix pre_rotation;   // V_L^dagger U_m^dagger
  CMatrix post_rotation;  // U_L^dagger
  double magnitude = 0.0;  // |C|
};

struct MeasuredState {
  QuantumState state;
  double probability;
};

/// Weighted list of candidate initial states, weights summing to one within 1e-12.
class PriorEnsemble {
 public:
  PriorEnsemble(std::vector<QuantumState> states, std::vector<double> weights);

  const std::vector<QuantumState>& states() const { return states_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return states_.size(); }
  /// sum_k P_k rho^(k)
  QuantumState averaged_state() const;

 private:
  std::vector<QuantumState> states_;
  std::vector<double> weights_;
};

/// Tr(M^dagger M rho)
/// Hermitizes and trace-normalizes an unnormalized density matrix.
QuantumState normalize_state(const CMatrix& rho, bool pure = false);

/// a rho a^dagger / Tr(...); impossible-outcome error when the trace vanishes.
QuantumState transform_state(const CMatrix& a, const QuantumState& rho);

double outcome_probability(const KrausOperator& m, const QuantumState& rho);

/// M rho M^dagger / P_m. Throws ImpossibleOutcomeError when P_m <= 1e-14.
MeasuredState apply_measurement(const KrausOperator& m, const QuantumState& rho);

PolarDecomposition polar_decompose(const KrausOperator& m);

/// Optimal reversal operator, |C| = sqrt(p_min). Passing a projector restricts
/// the minimisation (and the guarantee of restoration) to its range; L is then
/// C times the inverse of M on that subspace and zero on the complement of
/// its image. Throws UncollapseImpossibleError when p_min <= 1e-12.
UncollapseOperator build_uncollapse(const KrausOperator& m,
                                    const std::optional<CMatrix>& subspace_projector = std::nullopt);

/// The three-step reversal applied to a post-measurement state. `probability`
/// is the success probability Tr(L^dagger L rho') with rho' the pre-rotated state.
MeasuredState apply_uncollapse(const UncollapseOperator& op, const QuantumState& measured);

/// min P_m / P_m(rho_in), clamped to [0, 1].
double success_probability_bound(const KrausOperator& m, const QuantumState& rho_in);

/// Probability of outcome m followed by successful optimal reversal, |C|^2 = p_min.
double joint_success_probability(const KrausOperator& m);

/// 1 - sum_m min eig(E_m)
double irreversibility_measure(const PovmSet& povm);

/// Posterior over candidate states after outcome m.
PriorEnsemble bayes_update(const PriorEnsemble& prior, const KrausOperator& m);

/// Bayes update by outcome m, then by the success event of the reversal `op`.
PriorEnsemble pair_update(const PriorEnsemble& prior, const KrausOperator& m,
                          const UncollapseOperator& op);

}  // namespace qundo
