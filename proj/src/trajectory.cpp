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

#include "qundo/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

// Bridge crossing probabilities below e^{-40} are not sampled.
constexpr double kBridgeCutoff = 40.0;
constexpr double kRescaleAbove = 1e100;
constexpr double kRescaleBelow = 1e-100;

ChargeState sample_bit(const QuantumState& rho, NoiseStream& stream) {
  return stream.uniform() < rho.population(0) ? ChargeState::kOne : ChargeState::kTwo;
}

// 2x2 matrices on the integrator's hot path, row-major.
using M2 = std::array<Complex, 4>;

M2 mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

std::array<Complex, 2> mul(const M2& a, const std::array<Complex, 2>& v) {
  return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
}

M2 to_m2(const CMatrix& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

CMatrix to_cmatrix(const M2& m) { return CMatrix{{m[0], m[1]}, {m[2], m[3]}}; }

// Diagonal populations of A rho A^dagger, unnormalized.
std::array<double, 2> sandwiched_populations(const M2& a, const CMatrix& rho) {
  std::array<double, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const Complex x = a[2 * i];
    const Complex y = a[2 * i + 1];
    out[i] = (x * rho(0, 0) * std::conj(x) + x * rho(0, 1) * std::conj(y) +
              y * rho(1, 0) * std::conj(x) + y * rho(1, 1) * std::conj(y))
                 .real();
  }
  return out;
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(dtau > 0.0 && dtau <= 0.1)) throw ValidationError("trajectory: dtau must lie in (0, 0.1]");
  if (!std::isfinite(tau_max)) throw ValidationError("trajectory: tau_max must be finite");
  if (!(max_macro_step >= dtau) || !std::isfinite(max_macro_step)) {
    throw ValidationError("trajectory: max_macro_step must be >= dtau");
  }
  if (!std::isfinite(epsilon) || !std::isfinite(tunnel)) {
    throw ValidationError("trajectory: Hamiltonian parameters must be finite");
  }
  if (!(measure_duration > 0.0) || !std::isfinite(measure_duration)) {
    throw ValidationError("trajectory: measure_duration must be positive");
  }
  detector.validate();
}

double TrajectoryConfig::timeout_for(double r0) const {
  return tau_max > 0.0 ? tau_max : 100.0 * (std::abs(r0) + 1.0);
}

const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::kRunning: return "running";
    case TrajectoryStatus::kCrossed: return "crossed";
    case TrajectoryStatus::kTimedOut: return "timed-out";
  }
  return "unknown";
}

void kraus_eigenvalues(std::span<const Complex> v1, std::span<const Complex> v2,
                       double& lambda_plus, double& lambda_minus) {
  const double n1 = std::norm(v1[0]) + std::norm(v1[1]);
  const double n2 = std::norm(v2[0]) + std::norm(v2[1]);
  const double g = std::abs(inner(v1, v2));
  lambda_plus = 0.5 * (n1 + n2) + std::hypot(0.5 * (n1 - n2), g);
  const double det = std::norm(v1[0] * v2[1] - v1[1] * v2[0]);
  lambda_minus = lambda_plus > 0.0 ? det / lambda_plus : 0.0;
}

KrausExtraction KrausExtraction::from_matrix(const CMatrix& m, double log_scale) {
  if (m.rows() != 2 || m.cols() != 2) throw ValidationError("KrausExtraction: expected a 2x2 operator");
  KrausExtraction k;
  k.v1 = m.col(0);
  k.v2 = m.col(1);
  k.m = m;
  k.log_scale = log_scale;
  kraus_eigenvalues(k.v1, k.v2, k.lambda_plus, k.lambda_minus);
  return k;
}

TrajectoryRecord simulate_qnd(ChargeState truth, double r_start, const TrajectoryConfig& config,
                              NoiseStream& stream) {
  TrajectoryRecord rec;
  rec.r_start = r_start;
  rec.r_end = r_start;
  if (config.record_path) {
    rec.times.push_back(0.0);
    rec.path.push_back(r_start);
  }
  if (r_start == 0.0) {
    rec.status = TrajectoryStatus::kCrossed;
    return rec;
  }
  // Work with x = |r| > 0; the boundary is x = 0.
  const double sign = r_start > 0.0 ? 1.0 : -1.0;
  const double drift = sign * drift_velocity(truth);
  const double tau_max = config.timeout_for(r_start);
  double x = std::abs(r_start);
  double tau = 0.0;
  while (true) {
    const double remaining = tau_max - tau;
    if (remaining <= 1e-12 * tau_max) {
      rec.status = TrajectoryStatus::kTimedOut;
      break;
    }
    double dt = config.dtau;
    if (config.macro_steps) {
      const double span = std::min((x / 8.0) * (x / 8.0), config.max_macro_step);
      dt = std::max(1.0, std::floor(span / config.dtau)) * config.dtau;
    }
    dt = std::min(dt, remaining);
    const double inc = drift * dt + std::sqrt(dt) * stream.normal();
    const double xb = x + inc;
    tau += dt;
    ++rec.steps;
    bool crossed = xb <= 0.0;
    if (!crossed && config.bridge_correction) {
      const double e = 2.0 * x * xb / dt;
      if (e < kBridgeCutoff) crossed = stream.uniform() < std::exp(-e);
    }
    x = xb;
    if (config.record_path) {
      rec.times.push_back(tau);
      rec.path.push_back(sign * x);
      rec.increments.push_back(sign * inc);
    }
    if (crossed) {
      rec.status = TrajectoryStatus::kCrossed;
      break;
    }
  }
  rec.r_end = sign * x;
  rec.tau_end = tau;
  return rec;
}

WaitResult wait_and_stop(const QuantumState& rho_in, double r0, const TrajectoryConfig& config,
                         NoiseStream& stream) {
  if (rho_in.dim() != 2) throw ValidationError("wait_and_stop: qubit state required");
  if (!std::isfinite(r0)) throw ValidationError("wait_and_stop: r0 must be finite");
  WaitResult out;
  if (r0 == 0.0) {
    out.success = true;
    out.restored = rho_in;
    return out;
  }
  const ChargeState truth = sample_bit(qnd_posterior(rho_in, r0), stream);
  const TrajectoryRecord rec = simulate_qnd(truth, r0, config, stream);
  out.waiting_time = rec.tau_end;
  if (rec.status == TrajectoryStatus::kCrossed) {
    out.success = true;
    out.restored = qnd_posterior(rho_in, 0.0);
  }
  return out;
}

CollapseUndoResult measure_then_undo(const QuantumState& rho_in, double tau,
                                     const TrajectoryConfig& config, NoiseStream& stream) {
  if (rho_in.dim() != 2) throw ValidationError("measure_then_undo: qubit state required");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("measure_then_undo: tau must be >= 0");
  const ChargeState truth = sample_bit(rho_in, stream);
  CollapseUndoResult out;
  out.r0 = drift_velocity(truth) * tau + std::sqrt(tau) * stream.normal();
  const TrajectoryRecord rec = simulate_qnd(truth, out.r0, config, stream);
  out.success = rec.status == TrajectoryStatus::kCrossed;
  out.waiting_time = rec.tau_end;
  return out;
}

StretchResult qnd_stretch(const QuantumState& rho, double target, const TrajectoryConfig& config,
                          NoiseStream& stream) {
  if (rho.dim() != 2) throw ValidationError("qnd_stretch: qubit state required");
  StretchResult out;
  if (target == 0.0) {
    out.success = true;
    out.state = rho;
    return out;
  }
  // r reaches target exactly when r - target crosses zero.
  const ChargeState truth = sample_bit(rho, stream);
  const TrajectoryRecord rec = simulate_qnd(truth, -target, config, stream);
  out.waiting_time = rec.tau_end;
  if (rec.status == TrajectoryStatus::kCrossed) {
    out.success = true;
    out.state = qnd_posterior(rho, target);
  }
  return out;
}

double detector_current(const QuantumState& rho, const DetectorParams& params, double dt,
                        NoiseStream& stream) {
  if (rho.dim() != 2) throw ValidationError("detector_current: qubit state required");
  if (!(dt > 0.0)) throw ValidationError("detector_current: dt must be positive");
  return rho.population(0) * params.i1 + rho.population(1) * params.i2 +
         std::sqrt(0.5 * params.s_i / dt) * stream.normal();
}

namespace {

template <typename NormalSource>
EvolvingRun integrate_evolving(const QuantumState& rho_in, const TrajectoryConfig& config,
                               std::optional<CVector> psi_in, std::size_t steps,
                               NormalSource&& next_normal) {
  if (rho_in.dim() != 2) throw ValidationError("simulate_evolving: qubit state required");
  const DetectorParams& det = config.detector;
  const double t_m = det.measurement_time();
  const double dt = config.dtau * t_m;
  const double gain = det.delta_i() / det.s_i * dt;
  const double noise_sd = std::sqrt(0.5 * det.s_i / dt);
  const M2 half = to_m2(u2_exp(config.epsilon, config.tunnel, 0.5 * dt));
  const CMatrix& rho = rho_in.rho();

  M2 m{1.0, 0.0, 0.0, 1.0};
  std::array<Complex, 2> psi{};
  if (psi_in) psi = {(*psi_in)[0], (*psi_in)[1]};
  double log_scale = 0.0;
  double r = 0.0;

  EvolvingRun run{TrajectoryRecord{}, rho_in, std::nullopt, KrausExtraction{}};
  TrajectoryRecord& rec = run.record;
  if (config.record_path) {
    rec.times.reserve(steps + 1);
    rec.path.reserve(steps + 1);
    rec.increments.reserve(steps);
    rec.times.push_back(0.0);
    rec.path.push_back(0.0);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const M2 mh = mul(half, m);
    const auto pop = sandwiched_populations(mh, rho);
    // Populations at mid-step: half of the deterministic back-action of the
    // step is applied before the current is sampled.
    const double drift = gain * ((pop[0] * det.i1 + pop[1] * det.i2) / (pop[0] + pop[1]) - det.i0());
    const double p1 = pop[0] * std::exp(0.5 * drift);
    const double p2 = pop[1] * std::exp(-0.5 * drift);
    const double current = (p1 * det.i1 + p2 * det.i2) / (p1 + p2) + noise_sd * next_normal();
    const double dr = gain * (current - det.i0());
    const double e = std::exp(0.5 * dr);
    const M2 kick{e, 0.0, 0.0, 1.0 / e};
    const M2 step = mul(half, kick);
    m = mul(step, mh);
    if (psi_in) psi = mul(step, mul(half, psi));
    r += dr;
    double big = 0.0;
    for (const Complex& z : m) big = std::max(big, std::abs(z));
    if (big > kRescaleAbove || big < kRescaleBelow) {
      for (Complex& z : m) z /= big;
      for (Complex& z : psi) z /= big;
      log_scale += std::log(big);
    }
    if (config.record_path) {
      rec.times.push_back(static_cast<double>(k + 1) * config.dtau);
      rec.path.push_back(r);
      rec.increments.push_back(dr);
    }
  }
  rec.r_end = r;
  rec.tau_end = static_cast<double>(steps) * config.dtau;
  rec.steps = steps;
  rec.status = TrajectoryStatus::kRunning;

  const CMatrix mm = to_cmatrix(m);
  run.extraction = KrausExtraction::from_matrix(mm, log_scale);
  run.final_state = transform_state(mm, rho_in);
  if (psi_in) run.final_psi = CVector{psi[0], psi[1]};
  return run;
}

std::size_t step_count(const TrajectoryConfig& config) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.measure_duration / config.dtau)));
}

}  // namespace

EvolvingRun simulate_evolving(const QuantumState& rho_in, const TrajectoryConfig& config,
                              NoiseStream& stream) {
  config.validate();
  return integrate_evolving(rho_in, config, std::nullopt, step_count(config),
                            [&stream] { return stream.normal(); });
}

EvolvingRun simulate_evolving_pure(std::span<const Complex> psi_in, const TrajectoryConfig& config,
                                   NoiseStream& stream) {
  config.validate();
  if (psi_in.size() != 2) throw ValidationError("simulate_evolving_pure: 2-vector required");
  const QuantumState rho = QuantumState::from_pure(psi_in);
  return integrate_evolving(rho, config, CVector(psi_in.begin(), psi_in.end()), step_count(config),
                            [&stream] { return stream.normal(); });
}

EvolvingRun simulate_evolving_with_noise(const QuantumState& rho_in, const TrajectoryConfig& config,
                                         std::span<const double> normals,
                                         std::optional<CVector> psi_in) {
  config.validate();
  if (psi_in && psi_in->size() != 2) throw ValidationError("simulate_evolving_with_noise: 2-vector required");
  std::size_t next = 0;
  return integrate_evolving(rho_in, config, std::move(psi_in), normals.size(), [&] { return normals[next++]; });
}

}  // namespace qundo
