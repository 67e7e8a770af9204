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

// Monte Carlo trajectories of a double-dot charge qubit watched by a point
// contact. Times are in units of the measurement time T_M unless a name ends
// in `_time`, in which case the unit is the detector's physical time.

#include <cstdint>
#include <optional>
#include <vector>

#include "qundo/charge_analytics.hpp"
#include "qundo/matkernel.hpp"
#include "qundo/qmeas.hpp"
#include "qundo/rng.hpp"

namespace qundo {

struct TrajectoryConfig {
  double dtau = 1e-3;
  // Timeout; a non-positive value selects 100 (|r0| + 1).
  double tau_max = 0.0;
  bool bridge_correction = true;
  // Far from the boundary the walk takes k * dtau steps with
  // k = floor((|r| / 8)^2 / dtau), capped at max_macro_step. The increment and
  // the bridge test are exact for any step, so only the crossing time is
  // quantized, and only near the boundary where steps are fine again.
  bool macro_steps = true;
  double max_macro_step = 4.0;
  bool record_path = false;
  // Evolving qubit.
  double epsilon = 0.0;
  double tunnel = 0.0;
  double measure_duration = 1.0;
  DetectorParams detector{};

  void validate() const;
  double timeout_for(double r0) const;
};

enum class TrajectoryStatus { kRunning, kCrossed, kTimedOut };

const char* to_string(TrajectoryStatus s);

struct TrajectoryRecord {
  double r_start = 0.0;
  double r_end = 0.0;
  double tau_end = 0.0;
  TrajectoryStatus status = TrajectoryStatus::kRunning;
  std::uint64_t steps = 0;
  // Filled only when TrajectoryConfig::record_path is set; path[0] = (0, r_start).
  std::vector<double> times;
  std::vector<double> path;
  std::vector<double> increments;
};

struct KrausExtraction {
  CVector v1;  // image of |1>
  CVector v2;  // image of |2>
  CMatrix m;   // columns v1, v2; scaled by exp(-log_scale) relative to the raw solution
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double log_scale = 0.0;

  static KrausExtraction from_matrix(const CMatrix& m, double log_scale = 0.0);
};

/// Eigenvalues of M^dagger M from the columns of M; lambda_minus via the
/// determinant so that it keeps full relative accuracy.
void kraus_eigenvalues(std::span<const Complex> v1, std::span<const Complex> v2,
                       double& lambda_plus, double& lambda_minus);

/// Random walk of r for a classical bit with drift +1 (state 1) or -1
/// (state 2) and diffusion 1/2, absorbed when r reaches 0.
TrajectoryRecord simulate_qnd(ChargeState truth, double r_start, const TrajectoryConfig& config,
                              NoiseStream& stream);

struct WaitResult {
  bool success = false;
  double waiting_time = 0.0;  // in T_M
  std::optional<QuantumState> restored;
};

/// Undo a QND result r0 by measuring further until r returns to zero.
WaitResult wait_and_stop(const QuantumState& rho_in, double r0, const TrajectoryConfig& config,
                         NoiseStream& stream);

struct CollapseUndoResult {
  double r0 = 0.0;
  bool success = false;
  double waiting_time = 0.0;
};

/// First measurement of length tau followed by wait-and-stop on the same
/// realization of the true bit.
CollapseUndoResult measure_then_undo(const QuantumState& rho_in, double tau,
                                     const TrajectoryConfig& config, NoiseStream& stream);

/// Drives a QND measurement of `rho` until the accumulated result reaches
/// `target` and applies the corresponding normalized Kraus operator.
struct StretchResult {
  bool success = false;
  double waiting_time = 0.0;
  std::optional<QuantumState> state;
};

StretchResult qnd_stretch(const QuantumState& rho, double target, const TrajectoryConfig& config,
                          NoiseStream& stream);

double detector_current(const QuantumState& rho, const DetectorParams& params, double dt,
                        NoiseStream& stream);

struct EvolvingRun {
  TrajectoryRecord record;
  QuantumState final_state;
  std::optional<CVector> final_psi;  // unnormalized, scaled like extraction.m
  KrausExtraction extraction;
};

/// Evolves rho_in under H = -(eps/2) sz + H sx while the detector runs for
/// config.measure_duration. The record is generated self-consistently from
/// the current state.
EvolvingRun simulate_evolving(const QuantumState& rho_in, const TrajectoryConfig& config,
                              NoiseStream& stream);

EvolvingRun simulate_evolving_pure(std::span<const Complex> psi_in, const TrajectoryConfig& config,
                                   NoiseStream& stream);

/// Same integrator driven by externally supplied standard-normal draws, one
/// per step; used for step-halving studies with a shared Wiener path.
EvolvingRun simulate_evolving_with_noise(const QuantumState& rho_in, const TrajectoryConfig& config,
                                         std::span<const double> normals,
                                         std::optional<CVector> psi_in = std::nullopt);

}  // namespace qundo
