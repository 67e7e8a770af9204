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

// Null-result measurement of a phase qubit (state |2> may tunnel out of the
// well) and its reversal by a pi pulse, an identical measurement, and a
// second pi pulse.

#include <optional>
#include <vector>

#include "qundo/matkernel.hpp"
#include "qundo/qmeas.hpp"
#include "qundo/rng.hpp"

namespace qundo {

struct PhaseMeasurementParams {
  double p_t = 0.0;  // tunneling probability of |2>, 1 - exp(-Gamma t)
  double phi = 0.0;  // phase accumulated by |2> relative to |1> during the window

  void validate() const;
  static PhaseMeasurementParams from_gamma_t(double gamma_t, double phi = 0.0);
};

/// diag(1, sqrt(1 - p_t) e^{-i phi}).
CMatrix null_kraus(const PhaseMeasurementParams& params);

/// {E_n with its Kraus operator, E_y without one}.
PovmSet null_povm(const PhaseMeasurementParams& params);

QuantumState null_update(const QuantumState& rho, const PhaseMeasurementParams& params);

struct PhaseOutcome {
  bool tunneled = false;
  std::optional<QuantumState> state;  // empty when tunneled
};

PhaseOutcome sample_measurement(const QuantumState& rho, const PhaseMeasurementParams& params,
                                NoiseStream& stream);

/// -i sigma_x, realized as half a Rabi period of H sigma_x.
CMatrix pi_pulse();

struct ProtocolResult {
  bool success = false;
  std::optional<QuantumState> restored;
};

ProtocolResult uncollapse_protocol(const QuantumState& measured, const PhaseMeasurementParams& params,
                                   NoiseStream& stream);

struct PhaseExperiment {
  bool first_null = false;
  bool success = false;
  std::optional<QuantumState> restored;
};

/// First measurement followed, on a null result, by the uncollapse protocol.
PhaseExperiment run_phase_experiment(const QuantumState& rho_in, const PhaseMeasurementParams& params,
                                     NoiseStream& stream);

double success_probability(const QuantumState& rho_in, const PhaseMeasurementParams& params);

double joint_success(const PhaseMeasurementParams& params);

/// (|1>+|2>)/sqrt2, (|1>-i|2>)/sqrt2, |1>, |2>.
std::vector<QuantumState> tomography_inputs();

/// Superoperator S (acting on row-major vec(rho)) reproducing the given
/// input/output pairs; inputs must span the 2x2 operator space.
CMatrix process_superoperator(const std::vector<QuantumState>& inputs,
                              const std::vector<QuantumState>& outputs);

}  // namespace qundo
