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

#include "qundo/charge_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qundo/errors.hpp"
#include "qundo/quadrature.hpp"

namespace qundo {

namespace {

constexpr double kPi = std::numbers::pi;

void require_qubit(const QuantumState& s, const char* what) {
  if (s.dim() != 2) throw ValidationError(std::string(what) + ": expected a qubit state");
}

// e^{x^2/2} Phi(-x), evaluated without underflow for large x.
double scaled_normal_tail(double x) {
  if (x < 25.0) return 0.5 * std::exp(0.5 * x * x) * std::erfc(x / std::numbers::sqrt2);
  const double x2 = x * x;
  return (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)) / (x * std::sqrt(2.0 * std::numbers::pi));
}

// P(T > tau) for the first-passage law conditioned on crossing (inverse
// Gaussian with mean |r0| and shape r0^2), in closed form.
double conditional_survival(double tau, double r0) {
  const double a = std::abs(r0);
  const double s = std::sqrt(tau);
  const double x1 = (tau - a) / s;
  const double x2 = (tau + a) / s;
  if (x1 < 0.0) return 1.0 - 0.5 * std::erfc(-x1 / std::numbers::sqrt2) +
                       std::exp(2.0 * a) * 0.5 * std::erfc(x2 / std::numbers::sqrt2);
  return std::exp(-0.5 * x1 * x1) * (scaled_normal_tail(x1) - scaled_normal_tail(x2));
}

}  // namespace

void DetectorParams::validate() const {
  if (!std::isfinite(i1) || !std::isfinite(i2) || !std::isfinite(s_i)) {
    throw ValidationError("DetectorParams: non-finite value");
  }
  if (i1 == i2) throw ValidationError("DetectorParams: I1 must differ from I2");
  if (!(s_i > 0.0)) throw ValidationError("DetectorParams: S_I must be positive");
}

double gaussian_likelihood(ChargeState state, double mean_current, double t, const DetectorParams& p) {
  p.validate();
  if (!(t > 0.0)) throw ValidationError("gaussian_likelihood: averaging time must be positive");
  const double ii = state == ChargeState::kOne ? p.i1 : p.i2;
  const double d = mean_current - ii;
  return std::sqrt(t / (kPi * p.s_i)) * std::exp(-d * d * t / p.s_i);
}

double dimensionless_result(double mean_current, double t, const DetectorParams& p) {
  p.validate();
  return t * p.delta_i() * (mean_current - p.i0()) / p.s_i;
}

QuantumState qnd_posterior(const QuantumState& rho_in, double r) {
  require_qubit(rho_in, "qnd_posterior");
  if (!std::isfinite(r)) throw ValidationError("qnd_posterior: non-finite result");
  const CMatrix& in = rho_in.rho();
  const double r11 = in(0, 0).real();
  const double r22 = in(1, 1).real();
  if (r11 <= 0.0 || r22 <= 0.0) return rho_in;
  // Kraus diag(e^{r/2}, e^{-r/2}) rescaled by e^{-|r|/2} to avoid overflow.
  const double a2 = std::exp(r - std::abs(r));
  const double b2 = std::exp(-r - std::abs(r));
  const double ab = std::exp(-std::abs(r));
  const double z = a2 * r11 + b2 * r22;
  CMatrix out(2, 2);
  out(0, 0) = a2 * r11 / z;
  out(1, 1) = b2 * r22 / z;
  out(0, 1) = ab * in(0, 1) / z;
  out(1, 0) = std::conj(out(0, 1));
  return QuantumState(std::move(out), rho_in.is_pure());
}

double uncollapse_success_probability(const QuantumState& rho_in, double r0) {
  require_qubit(rho_in, "uncollapse_success_probability");
  // e^{-|r0|} / (e^{r0} rho11 + e^{-r0} rho22), written with bounded exponentials.
  const double a = std::abs(r0);
  const double num = std::exp(-2.0 * a);
  const double den = std::exp(r0 - a) * rho_in.population(0) + std::exp(-r0 - a) * rho_in.population(1);
  if (!(den > 0.0)) throw ImpossibleOutcomeError("uncollapse_success_probability: result impossible");
  return std::min(1.0, num / den);
}

double crossing_probability(ChargeState state, double r0) {
  if (!std::isfinite(r0)) return 0.0;
  if (r0 > 0.0) return state == ChargeState::kOne ? std::exp(-2.0 * r0) : 1.0;
  if (r0 < 0.0) return state == ChargeState::kTwo ? std::exp(2.0 * r0) : 1.0;
  return 1.0;
}

double green_function(double r, double tau, double r0, ChargeState state) {
  if (r0 < 0.0) {
    const ChargeState mirror = state == ChargeState::kOne ? ChargeState::kTwo : ChargeState::kOne;
    return green_function(-r, tau, -r0, mirror);
  }
  if (!(tau > 0.0) || r <= 0.0) return 0.0;
  const double v = drift_velocity(state);
  const double d = r - r0 - v * tau;
  const double free = std::exp(-d * d / (2.0 * tau)) / std::sqrt(2.0 * kPi * tau);
  return free * -std::expm1(-2.0 * r * r0 / tau);
}

double fpt_density(double tau, double r0, ChargeState state) {
  if (!(tau > 0.0) || r0 == 0.0) return 0.0;
  const double v = drift_velocity(state);
  const double e = r0 + v * tau;
  return std::abs(r0) / std::sqrt(2.0 * kPi * tau * tau * tau) * std::exp(-e * e / (2.0 * tau));
}

double conditional_fpt_density(double tau, double r0) {
  if (!(tau > 0.0) || r0 == 0.0) return 0.0;
  const double a = std::abs(r0);
  const double e = a - tau;
  return a / std::sqrt(2.0 * kPi * tau * tau * tau) * std::exp(-e * e / (2.0 * tau));
}

double waiting_time_pdf(double t, double r0, const DetectorParams& p) {
  const double tm = p.measurement_time();
  return conditional_fpt_density(t / tm, r0) / tm;
}

double waiting_time_cdf(double t, double r0, const DetectorParams& p) {
  if (r0 == 0.0) return t >= 0.0 ? 1.0 : 0.0;
  if (!(t > 0.0)) return 0.0;
  const double tm = p.measurement_time();
  const double tau = t / tm;
  const double v = adaptive_simpson([&](double x) { return conditional_fpt_density(x, r0); }, 0.0,
                                    tau, 1e-11);
  return std::clamp(v, 0.0, 1.0);
}

NormalizationCheck waiting_time_normalization(double r0, const DetectorParams& p) {
  const double tm = p.measurement_time();
  const double a = std::abs(r0);
  NormalizationCheck out;
  out.t_cut = tm * (a + 12.0 * std::sqrt(a + 1.0));
  if (r0 == 0.0) {
    out.integral = 1.0;
    out.tail_mass = 0.0;
    return out;
  }
  out.integral = adaptive_simpson([&](double t) { return waiting_time_pdf(t, r0, p); }, 0.0, out.t_cut,
                                  1e-11, 64);
  out.tail_mass = conditional_survival(out.t_cut / tm, r0);
  return out;
}

WaitingTimeMoments waiting_time_moments(double r0, const DetectorParams& p) {
  const double tm = p.measurement_time();
  const double a = std::abs(r0);
  return WaitingTimeMoments{tm * a, tm * std::sqrt(a), tm * (std::sqrt(r0 * r0 + 2.25) - 1.5)};
}

double total_success_probability(double t, const DetectorParams& p) {
  if (t < 0.0) throw ValidationError("total_success_probability: negative duration");
  if (t == 0.0) return 1.0;
  return erfc_approx(std::sqrt(t / (2.0 * p.measurement_time())));
}

double erfc_approx(double x) {
  const double z = std::abs(x);
  const double t = 1.0 / (1.0 + 0.5 * z);
  const double ans =
      t * std::exp(-z * z - 1.26551223 +
                   t * (1.00002368 +
                        t * (0.37409196 +
                             t * (0.09678418 +
                                  t * (-0.18628806 +
                                       t * (0.27886807 +
                                            t * (-1.13520398 +
                                                 t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))));
  return std::clamp(x >= 0.0 ? ans : 2.0 - ans, 0.0, 2.0);
}

double erf_approx(double x) { return 1.0 - erfc_approx(x); }

}  // namespace qundo
