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

#include "qundo/phase_qubit.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

void require_qubit(const QuantumState& s, const char* what) {
  if (s.dim() != 2) throw ValidationError(std::string(what) + ": qubit state required");
}

}  // namespace

void PhaseMeasurementParams::validate() const {
  if (!(p_t >= 0.0 && p_t < 1.0)) throw ValidationError("phase qubit: p_t must lie in [0, 1)");
  if (!std::isfinite(phi)) throw ValidationError("phase qubit: phi must be finite");
}

PhaseMeasurementParams PhaseMeasurementParams::from_gamma_t(double gamma_t, double phi) {
  if (!(gamma_t >= 0.0) || !std::isfinite(gamma_t)) throw ValidationError("phase qubit: Gamma t must be >= 0");
  return PhaseMeasurementParams{-std::expm1(-gamma_t), phi};
}

CMatrix null_kraus(const PhaseMeasurementParams& params) {
  params.validate();
  return CMatrix{{1.0, 0.0}, {0.0, std::sqrt(1.0 - params.p_t) * std::polar(1.0, -params.phi)}};
}

PovmSet null_povm(const PhaseMeasurementParams& params) {
  const KrausOperator kn(null_kraus(params), "null");
  const std::vector<double> ey{0.0, params.p_t};
  std::vector<PovmElement> elements;
  elements.push_back(PovmElement{"null", kn.effect(), kn});
  elements.push_back(PovmElement{"tunneled", CMatrix::diagonal(std::span<const double>(ey)), std::nullopt});
  return PovmSet(std::move(elements));
}

QuantumState null_update(const QuantumState& rho, const PhaseMeasurementParams& params) {
  require_qubit(rho, "null_update");
  return transform_state(null_kraus(params), rho);
}

PhaseOutcome sample_measurement(const QuantumState& rho, const PhaseMeasurementParams& params,
                                NoiseStream& stream) {
  require_qubit(rho, "sample_measurement");
  params.validate();
  PhaseOutcome out;
  out.tunneled = stream.uniform() < params.p_t * rho.population(1);
  if (!out.tunneled) out.state = null_update(rho, params);
  return out;
}

CMatrix pi_pulse() {
  constexpr double kTunnel = 1.0;
  return u2_exp(0.0, kTunnel, std::numbers::pi / (2.0 * kTunnel));
}

ProtocolResult uncollapse_protocol(const QuantumState& measured, const PhaseMeasurementParams& params,
                                   NoiseStream& stream) {
  require_qubit(measured, "uncollapse_protocol");
  const CMatrix pulse = pi_pulse();
  const PhaseOutcome second = sample_measurement(transform_state(pulse, measured), params, stream);
  ProtocolResult out;
  if (!second.tunneled) {
    out.success = true;
    out.restored = transform_state(pulse, *second.state);
  }
  return out;
}

PhaseExperiment run_phase_experiment(const QuantumState& rho_in, const PhaseMeasurementParams& params,
                                     NoiseStream& stream) {
  PhaseExperiment out;
  const PhaseOutcome first = sample_measurement(rho_in, params, stream);
  if (first.tunneled) return out;
  out.first_null = true;
  ProtocolResult undo = uncollapse_protocol(*first.state, params, stream);
  out.success = undo.success;
  out.restored = std::move(undo.restored);
  return out;
}

double success_probability(const QuantumState& rho_in, const PhaseMeasurementParams& params) {
  require_qubit(rho_in, "success_probability");
  params.validate();
  const double q = 1.0 - params.p_t;
  return q / (rho_in.population(0) + q * rho_in.population(1));
}

double joint_success(const PhaseMeasurementParams& params) {
  params.validate();
  return 1.0 - params.p_t;
}

std::vector<QuantumState> tomography_inputs() {
  const double h = std::numbers::sqrt2 / 2.0;
  const CVector plus{h, h};
  const CVector minus_i{h, Complex(0.0, -h)};
  const CVector one{1.0, 0.0};
  const CVector two{0.0, 1.0};
  return {QuantumState::from_pure(plus), QuantumState::from_pure(minus_i), QuantumState::from_pure(one),
          QuantumState::from_pure(two)};
}

CMatrix process_superoperator(const std::vector<QuantumState>& inputs,
                              const std::vector<QuantumState>& outputs) {
  if (inputs.size() != 4 || outputs.size() != 4) {
    throw ValidationError("process_superoperator: four input/output pairs required");
  }
  CMatrix in(4, 4);
  CMatrix out(4, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    require_qubit(inputs[k], "process_superoperator");
    require_qubit(outputs[k], "process_superoperator");
    const auto a = inputs[k].rho().entries();
    const auto b = outputs[k].rho().entries();
    for (std::size_t i = 0; i < 4; ++i) {
      in(i, k) = a[i];
      out(i, k) = b[i];
    }
  }
  return out * inverse(in);
}

}  // namespace qundo
