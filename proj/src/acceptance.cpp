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

#include "qundo/acceptance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "qundo/charge_analytics.hpp"
#include "qundo/ensemble.hpp"
#include "qundo/errors.hpp"
#include "qundo/evolving_uncollapse.hpp"
#include "qundo/multiqubit.hpp"
#include "qundo/phase_qubit.hpp"
#include "qundo/random_objects.hpp"
#include "qundo/stats.hpp"
#include "qundo/trajectory.hpp"

namespace qundo {
namespace {

template <typename Fn>
std::vector<std::uint8_t> flags(std::size_t n, unsigned workers, Fn&& fn) {
  return run_ensemble<std::uint8_t>(n, workers, [&](std::size_t i) { return std::uint8_t{fn(i)}; });
}

std::uint64_t count(const std::vector<std::uint8_t>& v) {
  std::uint64_t n = 0;
  for (std::uint8_t x : v) n += x;
  return n;
}

// Success probability after a QND result r0, written out from the
// likelihood ratio e^{2 r0}.
double qnd_reference(double p1, double r0) {
  return std::exp(-std::abs(r0)) / (p1 * std::exp(r0) + (1.0 - p1) * std::exp(-r0));
}

TrajectoryConfig evolving_config() {
  TrajectoryConfig c;
  c.epsilon = 1.0;
  c.tunnel = 1.0;
  c.measure_duration = 2.5;
  return c;
}

// ------------------------------------------------------------------------

CriterionResult qnd_success(std::uint64_t seed, unsigned workers) {
  CriterionResult r{1, "QND wait-and-stop success probability", true, Json::object()};
  const TrajectoryConfig cfg;
  const std::size_t n = 100000;
  Json points = Json::array();
  std::uint64_t k = 0;
  for (double p1 : {0.1, 0.5, 0.9}) {
    for (double r0 : {0.5, 1.0, 2.0}) {
      const std::uint64_t s = derive_seed(seed, k++);
      const QuantumState rho = QuantumState::qubit_diagonal(p1);
      const auto ok = flags(n, workers, [&](std::size_t i) {
        NoiseStream stream(s, i);
        return wait_and_stop(rho, r0, cfg, stream).success;
      });
      const double ref = qnd_reference(p1, r0);
      Json check = rate_check("success_rate", count(ok), n, ref);
      const double module_gap = std::abs(uncollapse_success_probability(rho, r0) - ref);
      check["rho11"] = p1;
      check["r0"] = r0;
      check["module_gap"] = module_gap;
      check["pass"] = check["pass"].get<bool>() && module_gap <= 1e-12;
      r.passed = r.passed && check["pass"].get<bool>();
      points.push_back(check);
    }
  }
  r.details["points"] = points;
  return r;
}

CriterionResult waiting_time_law(std::uint64_t seed, unsigned workers) {
  CriterionResult r{2, "Waiting-time distribution and mean", true, Json::object()};
  const TrajectoryConfig cfg;
  const DetectorParams det;
  const double r0 = 1.0;
  const QuantumState rho = QuantumState::qubit_diagonal(0.1);
  const std::size_t wanted = 100000;
  const std::size_t batch = 25000;
  std::vector<double> waits;
  std::size_t runs = 0;
  while (waits.size() < wanted) {
    const std::size_t offset = runs;
    const auto res = run_ensemble<WaitResult>(batch, workers, [&](std::size_t i) {
      NoiseStream stream(seed, offset + i);
      WaitResult w = wait_and_stop(rho, r0, cfg, stream);
      w.restored.reset();
      return w;
    });
    runs += batch;
    for (const WaitResult& w : res) {
      if (w.success && waits.size() < wanted) waits.push_back(w.waiting_time);
    }
  }
  const Json ks = ks_check("ks_distance", waits, r0, det, 0.01);
  const Json mean = mean_check("mean_waiting_time", waits, std::abs(r0) * 1.0);
  r.passed = ks["pass"].get<bool>() && mean["pass"].get<bool>();
  r.details = Json{{"r0", r0},
                   {"rho11", 0.1},
                   {"runs", runs},
                   {"ks", ks},
                   {"ks_critical_value", ks_critical_value(waits.size())},
                   {"mean", mean}};
  return r;
}

CriterionResult erf_law(std::uint64_t seed, unsigned workers) {
  CriterionResult r{3, "Total reversibility erf law and state independence", true, Json::object()};
  const TrajectoryConfig cfg;
  const std::size_t n = 100000;
  const double h = std::sqrt(0.5);
  const std::vector<std::pair<std::string, QuantumState>> states{
      {"mixed", QuantumState::maximally_mixed(2)},
      {"one", QuantumState::qubit_diagonal(1.0)},
      {"plus", QuantumState::from_pure(CVector{h, h})}};
  Json points = Json::array();
  std::uint64_t k = 0;
  for (double tau : {0.5, 1.0, 2.0, 4.0}) {
    const double ref = std::erfc(std::sqrt(tau / 2.0));
    std::vector<BernoulliEstimate> est;
    Json per_state = Json::array();
    for (const auto& [name, rho] : states) {
      const std::uint64_t s = derive_seed(seed, k++);
      const auto ok = flags(n, workers, [&](std::size_t i) {
        NoiseStream stream(s, i);
        return measure_then_undo(rho, tau, cfg, stream).success;
      });
      est.push_back(bernoulli_estimate(count(ok), n));
      Json check = rate_check("success_rate", count(ok), n, ref);
      check["state"] = name;
      r.passed = r.passed && check["pass"].get<bool>();
      per_state.push_back(check);
    }
    bool pairwise = true;
    for (std::size_t a = 0; a < est.size(); ++a)
      for (std::size_t b = a + 1; b < est.size(); ++b) pairwise = pairwise && consistent(est[a], est[b]);
    r.passed = r.passed && pairwise;
    points.push_back(Json{{"tau", tau},
                          {"reference", ref},
                          {"module_value", total_success_probability(tau, DetectorParams{})},
                          {"states", per_state},
                          {"pairwise_consistent", pairwise}});
  }
  r.details["points"] = points;
  return r;
}

CriterionResult exact_restoration(std::uint64_t seed, unsigned workers) {
  CriterionResult r{4, "Exact restoration on success", true, Json::object()};
  const std::size_t n = 200;
  // Abstract path.
  const auto abstract = run_ensemble<double>(n, workers, [&](std::size_t i) {
    NoiseStream s(derive_seed(seed, 0), i);
    const QuantumState rho = i % 2 == 0 ? random_pure_state(2, s) : random_mixed_state(2, s);
    const KrausOperator m = random_kraus(2, 0.05, s);
    const MeasuredState measured = apply_measurement(m, rho);
    const MeasuredState back = apply_uncollapse(build_uncollapse(m), measured.state);
    return max_abs_diff(back.state.rho(), rho.rho());
  });
  // Simulated evolving qubit, retrying the reversal on fresh measurements
  // until it succeeds.
  struct Evolved {
    double error = 0.0;
    double state_gap = 0.0;
    std::uint64_t attempts = 0;
  };
  const TrajectoryConfig cfg = evolving_config();
  const auto evolved = run_ensemble<Evolved>(n, workers, [&](std::size_t i) {
    NoiseStream prep(derive_seed(seed, 1), i);
    Evolved out;
    const bool pure = i % 2 == 0;
    const CVector psi = random_pure_amplitudes(2, prep);
    const QuantumState rho = pure ? QuantumState::from_pure(psi) : random_mixed_state(2, prep);
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
      NoiseStream s(derive_seed(seed, 2), i * 1000 + attempt);
      const EvolvingRun ev = pure ? simulate_evolving_pure(psi, cfg, s) : simulate_evolving(rho, cfg, s);
      QuantumState measured = ev.final_state;
      if (pure) {
        // The state vector is integrated alongside the operator.
        measured = QuantumState::from_pure(normalized(*ev.final_psi));
        out.state_gap = std::max(out.state_gap, max_abs_diff(measured.rho(), ev.final_state.rho()));
      }
      const PlanResult res = execute_plan(plan_from_kraus(ev.extraction), measured, cfg, s);
      out.attempts = attempt + 1;
      if (res.success) {
        out.error = max_abs_diff(res.restored->rho(), rho.rho());
        return out;
      }
    }
    out.error = 1.0;
    return out;
  });
  double worst_abstract = 0.0;
  for (double e : abstract) worst_abstract = std::max(worst_abstract, e);
  double worst_evolved = 0.0;
  double worst_gap = 0.0;
  std::uint64_t attempts = 0;
  for (const Evolved& e : evolved) {
    worst_evolved = std::max(worst_evolved, e.error);
    worst_gap = std::max(worst_gap, e.state_gap);
    attempts += e.attempts;
  }
  const Json a = bound_check("abstract_max_error", worst_abstract, 1e-9);
  const Json b = bound_check("evolving_max_error", worst_evolved, 1e-6);
  const Json c = bound_check("evolving_state_vector_gap", worst_gap, 1e-6);
  r.passed = a["pass"].get<bool>() && b["pass"].get<bool>() && c["pass"].get<bool>();
  r.details = Json{{"states", n}, {"dtau", cfg.dtau}, {"abstract", a}, {"evolving", b},
                   {"state_vector", c}, {"evolving_attempts", attempts}};
  return r;
}

CriterionResult zero_information(std::uint64_t seed, unsigned) {
  CriterionResult r{5, "Zero net information and state-independent joint success", true, Json::object()};
  double prior_gap = 0.0;
  double joint_gap = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    NoiseStream s(derive_seed(seed, 0), k);
    const std::size_t dim = 2 + k % 3;
    std::vector<QuantumState> states;
    std::vector<double> weights;
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      states.push_back(j % 2 == 0 ? random_pure_state(dim, s) : random_mixed_state(dim, s));
      weights.push_back(s.uniform());
      total += weights.back();
    }
    for (double& w : weights) w /= total;
    const PriorEnsemble prior(states, weights);
    const KrausOperator m = random_kraus(dim, 0.05, s);
    const PriorEnsemble after = pair_update(prior, m, build_uncollapse(m));
    for (std::size_t j = 0; j < 3; ++j) {
      prior_gap = std::max(prior_gap, std::abs(after.weights()[j] - weights[j]));
      prior_gap = std::max(prior_gap, max_abs_diff(after.states()[j].rho(), states[j].rho()));
    }
    const double joint = joint_success_probability(m);
    for (int j = 0; j < 10; ++j) {
      const QuantumState rho = random_mixed_state(dim, s);
      joint_gap = std::max(joint_gap,
                           std::abs(outcome_probability(m, rho) * success_probability_bound(m, rho) - joint));
    }
  }
  const Json a = bound_check("prior_restoration_gap", prior_gap, 1e-12);
  const Json b = bound_check("joint_success_gap", joint_gap, 1e-12);
  r.passed = a["pass"].get<bool>() && b["pass"].get<bool>();
  r.details = Json{{"trials", 50}, {"prior", a}, {"joint", b}};
  return r;
}

CriterionResult phase_qubit(std::uint64_t seed, unsigned workers) {
  CriterionResult r{6, "Phase qubit success probability and process identity", true, Json::object()};
  const std::vector<QuantumState> inputs = tomography_inputs();
  double formula_gap = 0.0;
  double general_gap = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const PhaseMeasurementParams p{0.1 * k, 0.0};
    for (const QuantumState& rho : inputs) {
      const double expect = (1.0 - p.p_t) / (rho.population(0) + (1.0 - p.p_t) * rho.population(1));
      formula_gap = std::max(formula_gap, std::abs(success_probability(rho, p) - expect));
      const KrausOperator m(null_kraus(p));
      const double general = apply_uncollapse(build_uncollapse(m), null_update(rho, p)).probability;
      general_gap = std::max(general_gap, std::abs(general - expect));
    }
  }
  const std::size_t n = 100000;
  const PhaseMeasurementParams mc{0.5, 0.7};
  const QuantumState mixed = QuantumState::maximally_mixed(2);
  const auto runs = run_ensemble<PhaseExperiment>(n, workers, [&](std::size_t i) {
    NoiseStream s(derive_seed(seed, 0), i);
    PhaseExperiment e = run_phase_experiment(mixed, mc, s);
    e.restored.reset();
    return e;
  });
  std::uint64_t nulls = 0;
  std::uint64_t ok = 0;
  for (const PhaseExperiment& e : runs) {
    nulls += e.first_null ? 1 : 0;
    ok += e.success ? 1 : 0;
  }
  const Json conditional = rate_check("conditional_success", ok, nulls, success_probability(mixed, mc));
  const Json joint = rate_check("joint_success", ok, n, joint_success(mc));

  // Process tomography conditioned on success, driven through the sampled protocol.
  double process_error = 0.0;
  std::uint64_t k = 0;
  for (double phi : {0.0, 0.9, -2.3}) {
    const PhaseMeasurementParams p{0.6, phi};
    std::vector<QuantumState> outputs;
    for (const QuantumState& rho : inputs) {
      for (std::uint64_t attempt = 0;; ++attempt) {
        NoiseStream s(derive_seed(seed, 1), k * 100000 + attempt);
        const PhaseExperiment e = run_phase_experiment(rho, p, s);
        if (e.success) {
          outputs.push_back(*e.restored);
          break;
        }
      }
      ++k;
    }
    process_error = std::max(process_error, max_abs_diff(process_superoperator(inputs, outputs), CMatrix::identity(4)));
  }
  const Json a = bound_check("formula_gap", formula_gap, 1e-15);
  const Json b = bound_check("general_bound_gap", general_gap, 1e-12);
  const Json c = bound_check("process_identity_error", process_error, 1e-10);
  r.passed = a["pass"].get<bool>() && b["pass"].get<bool>() && c["pass"].get<bool>() &&
             conditional["pass"].get<bool>() && joint["pass"].get<bool>();
  r.details = Json{{"formula", a}, {"general", b}, {"monte_carlo", {{"p_t", mc.p_t}, {"phi", mc.phi},
                   {"conditional", conditional}, {"joint", joint}}}, {"process", c}};
  return r;
}

CriterionResult evolving_optimality(std::uint64_t seed, unsigned workers) {
  CriterionResult r{7, "Evolving qubit optimal and two-step reversal", true, Json::object()};
  const TrajectoryConfig cfg = evolving_config();
  const std::size_t n = 10000;
  Json ops = Json::array();
  for (std::uint64_t k = 0; k < 10; ++k) {
    NoiseStream s(derive_seed(seed, 0), k);
    const KrausExtraction ex = simulate_evolving(QuantumState::maximally_mixed(2), cfg, s).extraction;
    const HermEig e = herm_eig(hermitian_part(ex.m.adjoint() * ex.m));
    const QuantumState eigen = QuantumState::from_pure(e.vectors.col(0));
    const QuantumState random = random_pure_state(2, s);
    const UncollapsePlan plan = plan_from_kraus(ex);
    const TwoStepPlan two = plan_two_step(ex, 1.0);

    auto optimal_rate = [&](const QuantumState& rho, std::uint64_t stream_id) {
      const QuantumState measured = transform_state(ex.m, rho);
      const std::uint64_t sd = derive_seed(seed, stream_id);
      return count(flags(n, workers, [&](std::size_t i) {
        NoiseStream st(sd, i);
        return execute_plan(plan, measured, cfg, st).success;
      }));
    };
    const std::uint64_t eigen_ok = optimal_rate(eigen, 100 + k);
    const std::uint64_t random_ok = optimal_rate(random, 200 + k);
    const QuantumState eigen_measured = transform_state(ex.m, eigen);
    const std::uint64_t sd = derive_seed(seed, 300 + k);
    const std::uint64_t two_ok = count(flags(n, workers, [&](std::size_t i) {
      NoiseStream st(sd, i);
      return execute_two_step(two, eigen_measured, cfg, st).success;
    }));

    const Json a = rate_check("eigenstate_success", eigen_ok, n, 1.0);
    const Json b = rate_check("random_state_success", random_ok, n, success_bound(ex, random));
    const double two_p = two_step_success_probability(two, eigen_measured);
    Json c = rate_check("two_step_success", two_ok, n, two_p);
    const double bound = success_bound(ex, eigen);
    c["bound"] = bound;
    c["below_bound"] = c["ci_high"].get<double>() < bound;
    c["pass"] = c["pass"].get<bool>() && c["below_bound"].get<bool>();
    const bool pass = a["pass"].get<bool>() && b["pass"].get<bool>() && c["pass"].get<bool>();
    r.passed = r.passed && pass;
    ops.push_back(Json{{"operator", k},
                       {"lambda_ratio", ex.lambda_minus / ex.lambda_plus},
                       {"eigenstate", a},
                       {"random_state", b},
                       {"two_step", c},
                       {"pass", pass}});
  }
  r.details = Json{{"runs", n}, {"duration", cfg.measure_duration}, {"two_step_c", 1.0}, {"operators", ops}};
  return r;
}

CriterionResult multiqubit(std::uint64_t seed, unsigned workers) {
  CriterionResult r{8, "Multiqubit stepwise reversal", true, Json::object()};
  const std::size_t n = 10000;
  const double gamma = 1.0;
  Json cases = Json::array();
  for (std::size_t q : {2u, 3u}) {
    const std::size_t dim = std::size_t{1} << q;
    NoiseStream s(derive_seed(seed, q), 0);
    const KrausOperator m = random_kraus(dim, 0.2, s);
    const QuantumState rho = random_pure_state(dim, s);
    const StepPlan plan = build_plan(m, gamma);
    const QuantumState rotated = prepare_input(plan, apply_measurement(m, rho).state);
    struct Row {
      bool success = false;
      double error = 0.0;
    };
    const std::uint64_t sd = derive_seed(seed, 100 + q);
    const auto rows = run_ensemble<Row>(n, workers, [&](std::size_t i) {
      NoiseStream st(sd, i);
      const MultiqubitResult res = execute_plan(plan, rotated, st);
      Row row{res.success, 0.0};
      if (res.success) row.error = max_abs_diff(res.restored->rho(), rho.rho());
      return row;
    });
    std::uint64_t ok = 0;
    double worst = 0.0;
    for (const Row& row : rows) {
      ok += row.success ? 1 : 0;
      worst = std::max(worst, row.error);
    }
    const StepwiseProbabilities sp = stepwise_probabilities(plan, rotated);
    double dual = 0.0;
    for (std::size_t i = 0; i < sp.trace_ratio.size(); ++i) {
      dual = std::max(dual, std::abs(sp.trace_ratio[i] - sp.normalized_state[i]));
    }
    const Json a = rate_check("success_rate", ok, n, success_probability(plan, rotated));
    const Json b = bound_check("stepwise_form_gap", dual, 1e-12);
    const Json c = bound_check("restoration_error", worst, 1e-9);
    const bool pass = a["pass"].get<bool>() && b["pass"].get<bool>() && c["pass"].get<bool>();
    r.passed = r.passed && pass;
    cases.push_back(Json{{"qubits", q}, {"success", a}, {"stepwise", b}, {"restoration", c}, {"pass", pass}});
  }
  r.details = Json{{"runs", n}, {"cases", cases}};
  return r;
}

CriterionResult first_passage_oracle(std::uint64_t seed, unsigned workers) {
  CriterionResult r{9, "First-passage probability from a brute-force lattice walk", true, Json::object()};
  const std::size_t n = 100000;
  const double r0 = 1.0;
  const double ceiling = 5.0;
  const double ref = std::exp(-2.0 * r0);
  const std::uint64_t s0 = derive_seed(seed, 0);
  const auto lattice = flags(n, workers, [&](std::size_t i) {
    NoiseStream st(s0, i);
    return lattice_walk_hits_zero(r0, ceiling, st);
  });
  const std::uint64_t s1 = derive_seed(seed, 1);
  const TrajectoryConfig cfg;
  const auto engine = flags(n, workers, [&](std::size_t i) {
    NoiseStream st(s1, i);
    return simulate_qnd(ChargeState::kOne, r0, cfg, st).status == TrajectoryStatus::kCrossed;
  });
  const Json a = rate_check("lattice_walk", count(lattice), n, ref);
  const Json b = rate_check("trajectory_engine", count(engine), n, ref);
  const Json c = bound_check("analytic_gap", std::abs(crossing_probability(ChargeState::kOne, r0) - ref), 1e-15);
  const bool agree = consistent(bernoulli_estimate(count(lattice), n), bernoulli_estimate(count(engine), n));
  r.passed = a["pass"].get<bool>() && b["pass"].get<bool>() && c["pass"].get<bool>() && agree;
  r.details = Json{{"r0", r0},
                   {"lattice_step", 0.01},
                   {"lattice_dtau", 1e-4},
                   {"lattice_ceiling", ceiling},
                   {"lattice", a},
                   {"engine", b},
                   {"analytic", c},
                   {"lattice_engine_consistent", agree}};
  return r;
}

}  // namespace

bool lattice_walk_hits_zero(double r0, double ceiling, NoiseStream& stream) {
  // Up-probability 0.505 as a mixture: a forced up-step with probability
  // 0.01, a fair coin otherwise. Fair stretches use one bit per step and are
  // summed 64 at a time when no barrier is within reach.
  constexpr double kForced = 0.01;
  const std::int64_t top = std::llround(ceiling / 0.01);
  std::int64_t x = std::llround(r0 / 0.01);
  if (x <= 0) return true;
  if (x >= top) return false;
  const double log_keep = std::log1p(-kForced);
  auto fair_run = [&] { return static_cast<std::uint64_t>(std::floor(std::log(stream.uniform()) / log_keep)); };
  std::uint64_t fair = fair_run();
  for (;;) {
    while (fair > 0) {
      const std::int64_t k = static_cast<std::int64_t>(std::min<std::uint64_t>(fair, 64));
      const std::uint64_t bits = stream.next_u64();
      if (x > k && x + k < top) {
        const std::uint64_t mask = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
        x += 2 * std::popcount(bits & mask) - k;
      } else {
        for (std::int64_t j = 0; j < k; ++j) {
          x += (bits >> j) & 1 ? 1 : -1;
          if (x <= 0) return true;
          if (x >= top) return false;
        }
      }
      fair -= static_cast<std::uint64_t>(k);
    }
    if (++x >= top) return false;
    fair = fair_run();
  }
}

CriterionResult run_criterion(int id, std::uint64_t seed, unsigned workers) {
  const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(id));
  switch (id) {
    case 1: return qnd_success(s, workers);
    case 2: return waiting_time_law(s, workers);
    case 3: return erf_law(s, workers);
    case 4: return exact_restoration(s, workers);
    case 5: return zero_information(s, workers);
    case 6: return phase_qubit(s, workers);
    case 7: return evolving_optimality(s, workers);
    case 8: return multiqubit(s, workers);
    case 9: return first_passage_oracle(s, workers);
    default: throw ValidationError("selftest: no criterion " + std::to_string(id));
  }
}

std::vector<CriterionResult> run_selftest(std::uint64_t seed, unsigned workers, const std::vector<int>& only,
                                          const std::function<void(const CriterionResult&)>& on_done) {
  std::vector<int> ids = only;
  if (ids.empty()) {
    for (int i = 1; i <= kCriteriaCount; ++i) ids.push_back(i);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, seed, workers));
    if (on_done) on_done(out.back());
  }
  return out;
}

void write_selftest(const std::filesystem::path& dir, std::uint64_t seed, const std::vector<CriterionResult>& results) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("output: cannot create " + dir.string() + ": " + ec.message());
  Json list = Json::array();
  bool pass = true;
  for (const CriterionResult& r : results) {
    char name[32];
    std::snprintf(name, sizeof name, "criterion_%02d.json", r.id);
    write_text(dir / name, dump(Json{{"id", r.id}, {"title", r.title}, {"pass", r.passed}, {"details", r.details}}));
    list.push_back(Json{{"id", r.id}, {"title", r.title}, {"pass", r.passed}});
    pass = pass && r.passed;
  }
  write_text(dir / "selftest.json",
             dump(Json{{"tool", "qundo"}, {"version", kVersion}, {"seed", seed}, {"criteria", list}, {"pass", pass}}));
}

}  // namespace qundo
