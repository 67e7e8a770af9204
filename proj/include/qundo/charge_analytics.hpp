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

// Closed-form results for a double-dot charge qubit measured by a quantum
// point contact without Hamiltonian evolution (QND regime). Times tau are in
// units of the measurement time T_M; the dimensionless result r(t) drifts
// with velocity +1 (state 1) or -1 (state 2) and diffuses with D = 1/2.

#include "qundo/qmeas.hpp"

namespace qundo {

enum class ChargeState { kOne = 1, kTwo = 2 };

/// Drift of r(tau) given the occupied dot: +1 for state 1, -1 for state 2.
inline double drift_velocity(ChargeState s) { return s == ChargeState::kOne ? 1.0 : -1.0; }

/// Point-contact currents and shot noise. I1 != I2, S_I > 0.
struct DetectorParams {
  double i1 = 1.0;
  double i2 = 0.0;
  double s_i = 0.5;

  void validate() const;
  double delta_i() const { return i1 - i2; }
  double i0() const { return 0.5 * (i1 + i2); }
  /// T_M = 2 S_I / (Delta I)^2
  double measurement_time() const { return 2.0 * s_i / (delta_i() * delta_i()); }
};

/// Density of observing the time-averaged current `mean_current` over a window
/// of length t when the qubit is in `state`.
double gaussian_likelihood(ChargeState state, double mean_current, double t, const DetectorParams& p);

/// r = t Delta I (Ibar - I0) / S_I
double dimensionless_result(double mean_current, double t, const DetectorParams& p);

/// Bayesian update for result r: rho11/rho22 gains e^{2r}, the murity
/// rho12/sqrt(rho11 rho22) is conserved. Pure inputs stay pure.
QuantumState qnd_posterior(const QuantumState& rho_in, double r);

/// Optimal (wait-and-stop) success probability after a first result r0.
double uncollapse_success_probability(const QuantumState& rho_in, double r0);

/// Probability that r(tau), started at r0, ever reaches 0.
double crossing_probability(ChargeState state, double r0);

/// Absorbing-boundary Green function on the half line that contains r0.
double green_function(double r, double tau, double r0, ChargeState state);

/// First-passage time density to r = 0 (unnormalized: integrates to
/// crossing_probability).
double fpt_density(double tau, double r0, ChargeState state);

/// fpt_density / crossing_probability; the same for both states.
double conditional_fpt_density(double tau, double r0);

/// Waiting-time density (per unit physical time) of a successful reversal.
double waiting_time_pdf(double t, double r0, const DetectorParams& p);

/// Integral of waiting_time_pdf over [0, t] by adaptive Simpson quadrature.
double waiting_time_cdf(double t, double r0, const DetectorParams& p);

struct NormalizationCheck {
  double integral;    // over (0, t_cut)
  double t_cut;       // T_M (|r0| + 12 sqrt(|r0| + 1))
  double tail_mass;   // closed-form mass beyond t_cut
};

NormalizationCheck waiting_time_normalization(double r0, const DetectorParams& p);

struct WaitingTimeMoments {
  double mean;
  double std;
  double mode;
};

/// (T_M |r0|, T_M sqrt|r0|, T_M (sqrt(r0^2 + 9/4) - 3/2)); all zero at r0 = 0.
WaitingTimeMoments waiting_time_moments(double r0, const DetectorParams& p);

/// Probability that a measurement of duration t can be undone, averaged over
/// its results: 1 - erf(sqrt(t / 2 T_M)).
double total_success_probability(double t, const DetectorParams& p);

/// erf from the Chebyshev-fitted erfc approximation (fractional error below
/// 1.2e-7 everywhere).
double erf_approx(double x);
double erfc_approx(double x);

}  // namespace qundo
