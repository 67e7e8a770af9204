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

#include "qundo/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qundo/ensemble.hpp"
#include "qundo/errors.hpp"
#include "qundo/evolving_uncollapse.hpp"
#include "qundo/multiqubit.hpp"
#include "qundo/phase_qubit.hpp"
#include "qundo/random_objects.hpp"
#include "qundo/stats.hpp"

namespace qundo {
namespace {

// Stream keys for draws that are shared by all runs of one experiment.
constexpr std::uint64_t kStateStream = 0x57a7e;
constexpr std::uint64_t kOperatorStream = 0x0be7a;

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported.
class Section {
 public:
  Section(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  const Json* find(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void read(const char* key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const char* key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "true or false");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::string& out) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void read(const char* key, std::vector<double>& out) {
    if (const Json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of numbers");
      out.clear();
      for (const Json& x : *v) {
        if (!x.is_number()) fail(key, "an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError(path_ + "." + it.key() + ": unknown field");
    }
  }

  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ValidationError(path_ + "." + key + ": expected " + what);
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Complex parse_complex(const Json& v, const std::string& where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  throw ValidationError(where + ": expected a number or [re, im]");
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

StateSpec parse_state(const Json& v) {
  StateSpec s;
  if (v.is_string()) {
    s.preset = v.get<std::string>();
    return s;
  }
  Section sec(v, "state");
  int given = 0;
  if (const Json* d = sec.find("diagonal")) {
    if (!d->is_number()) sec.fail("diagonal", "a number");
    s.diagonal = d->get<double>();
    ++given;
  }
  if (const Json* p = sec.find("pure")) {
    if (!p->is_array() || p->empty()) sec.fail("pure", "an array of amplitudes");
    CVector a;
    for (const Json& x : *p) a.push_back(parse_complex(x, "state.pure"));
    s.amplitudes = std::move(a);
    ++given;
  }
  if (const Json* m = sec.find("matrix")) {
    if (!m->is_array() || m->empty()) sec.fail("matrix", "an array of rows");
    const std::size_t n = m->size();
    CMatrix rho(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(*m)[i].is_array() || (*m)[i].size() != n) sec.fail("matrix", "a square array of rows");
      for (std::size_t j = 0; j < n; ++j) rho(i, j) = parse_complex((*m)[i][j], "state.matrix");
    }
    s.matrix = std::move(rho);
    ++given;
  }
  if (const Json* p = sec.find("preset")) {
    if (!p->is_string()) sec.fail("preset", "a string");
    s.preset = p->get<std::string>();
    ++given;
  }
  sec.finish();
  if (given != 1) throw ValidationError("state: give exactly one of preset, diagonal, pure, matrix");
  return s;
}

Json state_json(const StateSpec& s) {
  if (s.diagonal) return Json{{"diagonal", *s.diagonal}};
  if (s.amplitudes) {
    Json a = Json::array();
    for (Complex c : *s.amplitudes) a.push_back(complex_json(c));
    return Json{{"pure", a}};
  }
  if (s.matrix) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < s.matrix->rows(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < s.matrix->cols(); ++j) row.push_back(complex_json((*s.matrix)(i, j)));
      rows.push_back(row);
    }
    return Json{{"matrix", rows}};
  }
  return s.preset;
}

const std::vector<std::string> kPresets{"mixed", "one", "two", "plus", "minus-i", "random-pure", "random-mixed"};

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + ": must be finite");
}

TrajectoryConfig evolving_trajectory(const ExperimentConfig& c) {
  TrajectoryConfig t = c.trajectory;
  t.epsilon = c.evolving.epsilon;
  t.tunnel = c.evolving.tunnel;
  t.measure_duration = c.evolving.duration;
  return t;
}

QuantumState resolved_state(const ExperimentConfig& c, std::size_t dim) {
  NoiseStream s(derive_seed(c.seed, kStateStream), 0);
  return c.state.resolve(dim, s);
}

Json::json_pointer parameter_pointer(const std::string& dotted) {
  std::string path = "/" + dotted;
  std::replace(path.begin(), path.end(), '.', '/');
  try {
    return Json::json_pointer(path);
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("sweep.parameter: malformed name '" + dotted + "'");
  }
}

Json base_summary(const ExperimentConfig& c) {
  return Json{{"tool", "qundo"}, {"version", kVersion}, {"kind", to_string(c.kind)}, {"seed", c.seed},
              {"runs", c.runs}};
}

void finish_summary(Json& summary, Json checks) {
  summary["pass"] = all_pass(checks);
  summary["checks"] = std::move(checks);
}

// ----------------------------------------------------------------- charge

struct ChargeRow {
  bool success = false;
  double waiting_time = 0.0;
  double r0 = 0.0;
  double error = 0.0;
};

RunOutput run_charge(const ExperimentConfig& c, unsigned workers) {
  const QuantumState rho = resolved_state(c, 2);
  const bool undo_only = c.charge.mode == "wait-and-stop";
  const auto rows = run_ensemble<ChargeRow>(c.runs, workers, [&](std::size_t i) {
    NoiseStream s(c.seed, i);
    ChargeRow row;
    if (undo_only) {
      const WaitResult w = wait_and_stop(rho, c.charge.r0, c.trajectory, s);
      row = {w.success, w.waiting_time, c.charge.r0, 0.0};
      if (w.success) row.error = max_abs_diff(w.restored->rho(), rho.rho());
    } else {
      const CollapseUndoResult r = measure_then_undo(rho, c.charge.measure_time, c.trajectory, s);
      row = {r.success, r.waiting_time, r.r0, 0.0};
    }
    return row;
  });

  RunOutput out;
  out.table.columns = {"index", "success", "waiting_time", "r0"};
  std::uint64_t ok = 0;
  std::vector<double> waits;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ChargeRow& r = rows[i];
    out.table.rows.push_back({static_cast<std::int64_t>(i), std::int64_t{r.success}, r.waiting_time, r.r0});
    if (r.success) {
      ++ok;
      waits.push_back(r.waiting_time);
      worst = std::max(worst, r.error);
    }
  }
  Json checks = Json::array();
  out.summary = base_summary(c);
  if (undo_only) {
    checks.push_back(rate_check("success_rate", ok, c.runs, uncollapse_success_probability(rho, c.charge.r0)));
    if (waits.size() >= 2 && c.charge.r0 != 0.0) {
      checks.push_back(mean_check("mean_waiting_time", waits, std::abs(c.charge.r0)));
    }
    if (waits.size() >= 100 && c.charge.r0 != 0.0) {
      checks.push_back(ks_check("waiting_time_ks", waits, c.charge.r0, c.detector, ks_critical_value(waits.size())));
    }
    checks.push_back(bound_check("restoration_error", worst, 1e-9));
    // Crossings later than the cutoff are counted as failures.
    const double tm = c.detector.measurement_time();
    const double cutoff = c.trajectory.timeout_for(c.charge.r0);
    out.summary["timeout"] = cutoff;
    out.summary["timeout_residual"] = uncollapse_success_probability(rho, c.charge.r0) *
                                      (1.0 - waiting_time_cdf(cutoff * tm, c.charge.r0, c.detector));
  } else {
    const double t = c.charge.measure_time * c.detector.measurement_time();
    checks.push_back(rate_check("success_rate", ok, c.runs, std::erfc(std::sqrt(t / (2.0 * c.detector.measurement_time())))));
    out.summary["erf_law_module"] = total_success_probability(t, c.detector);
  }
  finish_summary(out.summary, std::move(checks));
  return out;
}

// --------------------------------------------------------------- evolving

struct EvolvingRow {
  bool success = false;
  double waiting_time = 0.0;
  double reference = 0.0;
  double bound = 0.0;
  double error = 0.0;
};

RunOutput run_evolving(const ExperimentConfig& c, unsigned workers) {
  const QuantumState rho = resolved_state(c, 2);
  const TrajectoryConfig tc = evolving_trajectory(c);
  const bool two_step = c.evolving.method == "two-step";
  const SvdOrdering ordering =
      c.evolving.ordering == "plus-first" ? SvdOrdering::kPlusFirst : SvdOrdering::kMinusFirst;
  const auto rows = run_ensemble<EvolvingRow>(c.runs, workers, [&](std::size_t i) {
    NoiseStream s(c.seed, i);
    const EvolvingRun ev = simulate_evolving(rho, tc, s);
    EvolvingRow row;
    row.bound = success_bound(ev.extraction, rho);
    std::optional<QuantumState> restored;
    if (two_step) {
      const TwoStepPlan plan = plan_two_step(ev.extraction, c.evolving.c);
      row.reference = two_step_success_probability(plan, ev.final_state);
      const TwoStepResult r = execute_two_step(plan, ev.final_state, tc, s);
      row.success = r.success;
      row.waiting_time = r.waiting_time;
      restored = r.restored;
    } else {
      const UncollapsePlan plan = plan_from_kraus(ev.extraction, ordering);
      row.reference = plan_success_probability(plan, ev.final_state);
      const PlanResult r = execute_plan(plan, ev.final_state, tc, s);
      row.success = r.success;
      row.waiting_time = r.waiting_time;
      restored = r.restored;
    }
    if (restored) row.error = max_abs_diff(restored->rho(), rho.rho());
    return row;
  });

  RunOutput out;
  out.table.columns = {"index", "success", "waiting_time", "reference", "bound", "error"};
  std::uint64_t ok = 0;
  double ref = 0.0;
  double bound = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EvolvingRow& r = rows[i];
    out.table.rows.push_back(
        {static_cast<std::int64_t>(i), std::int64_t{r.success}, r.waiting_time, r.reference, r.bound, r.error});
    ok += r.success ? 1 : 0;
    ref += r.reference;
    bound += r.bound;
    worst = std::max(worst, r.error);
  }
  const double n = static_cast<double>(c.runs);
  out.summary = base_summary(c);
  out.summary["mean_bound"] = bound / n;
  Json checks = Json::array();
  checks.push_back(rate_check("success_rate", ok, c.runs, ref / n));
  checks.push_back(bound_check("restoration_error", worst, 1e-6));
  finish_summary(out.summary, std::move(checks));
  return out;
}

// ------------------------------------------------------------------ phase

struct PhaseRow {
  bool first_null = false;
  bool success = false;
  double error = 0.0;
};

RunOutput run_phase(const ExperimentConfig& c, unsigned workers) {
  const QuantumState rho = resolved_state(c, 2);
  const PhaseMeasurementParams p{c.phase.p_t, c.phase.phi};
  const auto rows = run_ensemble<PhaseRow>(c.runs, workers, [&](std::size_t i) {
    NoiseStream s(c.seed, i);
    const PhaseExperiment e = run_phase_experiment(rho, p, s);
    PhaseRow row{e.first_null, e.success, 0.0};
    if (e.success) row.error = max_abs_diff(e.restored->rho(), rho.rho());
    return row;
  });

  RunOutput out;
  out.table.columns = {"index", "first_null", "success"};
  std::uint64_t nulls = 0;
  std::uint64_t ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.table.rows.push_back(
        {static_cast<std::int64_t>(i), std::int64_t{rows[i].first_null}, std::int64_t{rows[i].success}});
    nulls += rows[i].first_null ? 1 : 0;
    ok += rows[i].success ? 1 : 0;
    worst = std::max(worst, rows[i].error);
  }
  out.summary = base_summary(c);
  Json checks = Json::array();
  checks.push_back(rate_check("null_rate", nulls, c.runs, rho.population(0) + (1.0 - p.p_t) * rho.population(1)));
  if (nulls > 0) checks.push_back(rate_check("success_rate", ok, nulls, success_probability(rho, p)));
  checks.push_back(rate_check("joint_success_rate", ok, c.runs, joint_success(p)));
  checks.push_back(bound_check("restoration_error", worst, 1e-10));
  finish_summary(out.summary, std::move(checks));
  return out;
}

// ------------------------------------------------------------- multiqubit

struct MultiRow {
  bool success = false;
  std::size_t failed_step = 0;
  double error = 0.0;
};

RunOutput run_multiqubit(const ExperimentConfig& c, unsigned workers) {
  const std::size_t dim = std::size_t{1} << c.multiqubit.qubits;
  NoiseStream op_stream(derive_seed(c.seed, kOperatorStream), 0);
  const KrausOperator m = random_kraus(dim, c.multiqubit.min_effect, op_stream);
  const QuantumState rho = resolved_state(c, dim);
  const StepPlan plan = build_plan(m, c.multiqubit.gamma);
  const MeasuredState measured = apply_measurement(m, rho);
  const QuantumState rotated = prepare_input(plan, measured.state);

  const auto rows = run_ensemble<MultiRow>(c.runs, workers, [&](std::size_t i) {
    NoiseStream s(c.seed, i);
    const MultiqubitResult r = execute_plan(plan, rotated, s);
    MultiRow row{r.success, r.failed_step, 0.0};
    if (r.success) row.error = max_abs_diff(r.restored->rho(), rho.rho());
    return row;
  });

  RunOutput out;
  out.table.columns = {"index", "success", "failed_step"};
  std::uint64_t ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.table.rows.push_back({static_cast<std::int64_t>(i), std::int64_t{rows[i].success},
                              static_cast<std::int64_t>(rows[i].failed_step)});
    ok += rows[i].success ? 1 : 0;
    worst = std::max(worst, rows[i].error);
  }
  const double ps = success_probability(plan, rotated);
  const StepwiseProbabilities sp = stepwise_probabilities(plan, rotated);
  double dual = 0.0;
  double product = 1.0;
  for (std::size_t i = 0; i < sp.trace_ratio.size(); ++i) {
    dual = std::max(dual, std::abs(sp.trace_ratio[i] - sp.normalized_state[i]));
    product *= sp.trace_ratio[i];
  }
  out.summary = base_summary(c);
  out.summary["dimension"] = dim;
  out.summary["min_effect_eigenvalue"] = plan.eigenvalues.front();
  out.summary["durations_gamma_t"] = Json::array();
  for (const PlanStep& st : plan.steps) out.summary["durations_gamma_t"].push_back(c.multiqubit.gamma * st.duration);
  Json checks = Json::array();
  checks.push_back(rate_check("success_rate", ok, c.runs, ps));
  checks.push_back(bound_check("bound_gap", std::abs(ps - success_probability_bound(m, rho)), 1e-12));
  checks.push_back(bound_check("stepwise_form_gap", dual, 1e-12));
  checks.push_back(bound_check("stepwise_product_gap", std::abs(product - ps), 1e-12));
  checks.push_back(bound_check("joint_success_gap", std::abs(measured.probability * ps - plan.eigenvalues.front()), 1e-12));
  checks.push_back(bound_check("operator_product_error", max_abs_diff(plan.operator_product(), plan.target_operator()), 1e-8));
  checks.push_back(bound_check("restoration_error", worst, 1e-9));
  finish_summary(out.summary, std::move(checks));
  return out;
}

// -------------------------------------------------------------- analytics

RunOutput run_analytics(const ExperimentConfig& c) {
  const AnalyticsSettings& a = c.analytics;
  const double tm = c.detector.measurement_time();
  RunOutput out;
  out.table.columns = {"r0", "t", "pdf", "cdf"};
  Json checks = Json::array();
  Json curves = Json::array();
  for (double r0 : a.r0) {
    double previous = 0.0;
    bool monotone = true;
    std::size_t peak = 0;
    double peak_value = -1.0;
    for (std::size_t k = 1; k <= a.points; ++k) {
      const double t = a.t_max * static_cast<double>(k) / static_cast<double>(a.points);
      const double pdf = waiting_time_pdf(t * tm, r0, c.detector) * tm;
      const double cdf = waiting_time_cdf(t * tm, r0, c.detector);
      monotone = monotone && cdf >= previous;
      previous = cdf;
      if (pdf > peak_value) {
        peak_value = pdf;
        peak = k;
      }
      out.table.rows.push_back({r0, t, pdf, cdf});
    }
    const NormalizationCheck norm = waiting_time_normalization(r0, c.detector);
    const WaitingTimeMoments mom = waiting_time_moments(r0, c.detector);
    const std::string tag = "r0=" + format_double(r0);
    checks.push_back(bound_check("normalization_error " + tag, std::abs(norm.integral + norm.tail_mass - 1.0), 1e-6));
    checks.push_back(bound_check("mean_minus_abs_r0 " + tag, std::abs(mom.mean / tm - std::abs(r0)), 1e-9));
    Json mono{{"name", "cdf_monotone " + tag}, {"value", monotone}, {"pass", monotone}};
    checks.push_back(mono);
    curves.push_back(Json{{"r0", r0},
                          {"mean", mom.mean / tm},
                          {"std", mom.std / tm},
                          {"mode", mom.mode / tm},
                          {"grid_peak", a.t_max * static_cast<double>(peak) / static_cast<double>(a.points)},
                          {"crossing_probability_state1", crossing_probability(ChargeState::kOne, r0)},
                          {"uncollapse_probability_mixed",
                           uncollapse_success_probability(QuantumState::maximally_mixed(2), r0)}});
  }
  out.summary = base_summary(c);
  out.summary.erase("runs");
  out.summary["curves"] = curves;
  finish_summary(out.summary, std::move(checks));
  return out;
}

// ------------------------------------------------------------------ sweep

void flatten_checks(const Json& checks, std::vector<std::string>* columns, std::vector<Cell>& row) {
  for (const Json& ch : checks) {
    const std::string name = ch.at("name").get<std::string>();
    for (auto it = ch.begin(); it != ch.end(); ++it) {
      if (it.key() == "name") continue;
      const Json& v = it.value();
      Cell cell;
      if (v.is_boolean()) {
        cell = std::int64_t{v.get<bool>()};
      } else if (v.is_number_integer()) {
        cell = v.get<std::int64_t>();
      } else if (v.is_number()) {
        cell = v.get<double>();
      } else {
        continue;
      }
      if (columns) columns->push_back(name + "." + it.key());
      row.push_back(cell);
    }
  }
}

RunOutput run_sweep(const ExperimentConfig& c, unsigned workers) {
  ExperimentConfig base = c;
  base.kind = c.sweep.experiment;
  RunOutput out;
  out.table.columns = {"point", "value", "seed"};
  Json points = Json::array();
  bool pass = true;
  for (std::size_t k = 0; k < c.sweep.values.size(); ++k) {
    ExperimentConfig point = base.with_parameter(c.sweep.parameter, c.sweep.values[k]);
    point.seed = derive_seed(c.seed, k);
    const RunOutput sub = run_experiment(point, workers);
    std::vector<Cell> row{static_cast<std::int64_t>(k), c.sweep.values[k], std::to_string(point.seed)};
    flatten_checks(sub.summary.at("checks"), k == 0 ? &out.table.columns : nullptr, row);
    out.table.rows.push_back(std::move(row));
    pass = pass && sub.summary.at("pass").get<bool>();
    points.push_back(Json{{"point", k}, {"value", c.sweep.values[k]}, {"seed", point.seed},
                          {"pass", sub.summary.at("pass")}});
  }
  out.summary = base_summary(c);
  out.summary["experiment"] = to_string(c.sweep.experiment);
  out.summary["parameter"] = c.sweep.parameter;
  out.summary["points"] = points;
  out.summary["pass"] = pass;
  return out;
}

}  // namespace

// ------------------------------------------------------------ public API

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kChargeQnd: return "charge-qnd";
    case ExperimentKind::kChargeEvolving: return "charge-evolving";
    case ExperimentKind::kPhase: return "phase";
    case ExperimentKind::kMultiqubit: return "multiqubit";
    case ExperimentKind::kAnalytics: return "analytics";
    case ExperimentKind::kSweep: return "sweep";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::kChargeQnd, ExperimentKind::kChargeEvolving, ExperimentKind::kPhase,
                           ExperimentKind::kMultiqubit, ExperimentKind::kAnalytics, ExperimentKind::kSweep}) {
    if (name == to_string(k)) return k;
  }
  throw ValidationError("kind: unknown experiment '" + name + "'");
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw ValidationError("format: expected csv or json, got '" + name + "'");
}

QuantumState StateSpec::resolve(std::size_t dim, NoiseStream& stream) const {
  if (diagonal) {
    if (dim != 2) throw ValidationError("state.diagonal: only for a single qubit");
    if (!(*diagonal >= 0.0 && *diagonal <= 1.0)) throw ValidationError("state.diagonal: must lie in [0, 1]");
    return QuantumState::qubit_diagonal(*diagonal);
  }
  if (amplitudes) {
    if (amplitudes->size() != dim) throw ValidationError("state.pure: wrong number of amplitudes");
    if (!(norm(*amplitudes) > 0.0)) throw ValidationError("state.pure: zero vector");
    return QuantumState::from_pure(normalized(*amplitudes));
  }
  if (matrix) {
    if (matrix->rows() != dim) throw ValidationError("state.matrix: wrong dimension");
    return QuantumState(*matrix);
  }
  const double h = std::sqrt(0.5);
  CVector v(dim, 0.0);
  if (preset == "mixed") return QuantumState::maximally_mixed(dim);
  if (preset == "random-pure") return random_pure_state(dim, stream);
  if (preset == "random-mixed") return random_mixed_state(dim, stream);
  if (dim != 2) throw ValidationError("state: preset '" + preset + "' is only defined for a qubit");
  if (preset == "one") return QuantumState::qubit_diagonal(1.0);
  if (preset == "two") return QuantumState::qubit_diagonal(0.0);
  if (preset == "plus") return QuantumState::from_pure(CVector{h, h});
  if (preset == "minus-i") return QuantumState::from_pure(CVector{h, Complex(0.0, -h)});
  throw ValidationError("state: unknown preset '" + preset + "'");
}

ExperimentConfig ExperimentConfig::from_json(const Json& doc) {
  ExperimentConfig c;
  Section top(doc, "config");
  std::string kind = to_string(c.kind);
  top.read("kind", kind);
  c.kind = parse_kind(kind);
  top.read("seed", c.seed);
  top.read("runs", c.runs);
  if (const Json* s = top.find("state")) c.state = parse_state(*s);
  if (const Json* d = top.find("detector")) {
    Section sec(*d, "detector");
    sec.read("i1", c.detector.i1);
    sec.read("i2", c.detector.i2);
    sec.read("s_i", c.detector.s_i);
    sec.finish();
  }
  if (const Json* t = top.find("trajectory")) {
    Section sec(*t, "trajectory");
    sec.read("dtau", c.trajectory.dtau);
    sec.read("tau_max", c.trajectory.tau_max);
    sec.read("bridge_correction", c.trajectory.bridge_correction);
    sec.read("macro_steps", c.trajectory.macro_steps);
    sec.read("max_macro_step", c.trajectory.max_macro_step);
    sec.finish();
  }
  if (const Json* t = top.find("charge")) {
    Section sec(*t, "charge");
    sec.read("mode", c.charge.mode);
    sec.read("r0", c.charge.r0);
    sec.read("measure_time", c.charge.measure_time);
    sec.finish();
  }
  if (const Json* t = top.find("evolving")) {
    Section sec(*t, "evolving");
    sec.read("epsilon", c.evolving.epsilon);
    sec.read("tunnel", c.evolving.tunnel);
    sec.read("duration", c.evolving.duration);
    sec.read("method", c.evolving.method);
    sec.read("ordering", c.evolving.ordering);
    sec.read("c", c.evolving.c);
    sec.finish();
  }
  if (const Json* t = top.find("phase")) {
    Section sec(*t, "phase");
    sec.read("p_t", c.phase.p_t);
    sec.read("phi", c.phase.phi);
    sec.finish();
  }
  if (const Json* t = top.find("multiqubit")) {
    Section sec(*t, "multiqubit");
    sec.read("qubits", c.multiqubit.qubits);
    sec.read("gamma", c.multiqubit.gamma);
    sec.read("min_effect", c.multiqubit.min_effect);
    sec.finish();
  }
  if (const Json* t = top.find("analytics")) {
    Section sec(*t, "analytics");
    sec.read("r0", c.analytics.r0);
    sec.read("t_max", c.analytics.t_max);
    sec.read("points", c.analytics.points);
    sec.finish();
  }
  if (const Json* t = top.find("sweep")) {
    Section sec(*t, "sweep");
    std::string exp = to_string(c.sweep.experiment);
    sec.read("experiment", exp);
    c.sweep.experiment = parse_kind(exp);
    sec.read("parameter", c.sweep.parameter);
    sec.read("values", c.sweep.values);
    if (const Json* r = sec.find("range")) {
      if (sec.find("values") && !c.sweep.values.empty()) {
        throw ValidationError("sweep: give either values or range");
      }
      Section range(*r, "sweep.range");
      double start = 0.0;
      double stop = 0.0;
      std::uint64_t count = 0;
      range.read("start", start);
      range.read("stop", stop);
      range.read("count", count);
      range.finish();
      c.sweep.values.clear();
      for (std::uint64_t k = 0; k < count; ++k) {
        c.sweep.values.push_back(count == 1 ? start
                                            : start + (stop - start) * static_cast<double>(k) /
                                                          static_cast<double>(count - 1));
      }
    }
    sec.finish();
  }
  top.finish();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

Json ExperimentConfig::to_json() const {
  Json values = Json::array();
  for (double v : sweep.values) values.push_back(v);
  return Json{
      {"kind", qundo::to_string(kind)},
      {"seed", seed},
      {"runs", runs},
      {"state", state_json(state)},
      {"detector", {{"i1", detector.i1}, {"i2", detector.i2}, {"s_i", detector.s_i}}},
      {"trajectory",
       {{"dtau", trajectory.dtau},
        {"tau_max", trajectory.tau_max},
        {"bridge_correction", trajectory.bridge_correction},
        {"macro_steps", trajectory.macro_steps},
        {"max_macro_step", trajectory.max_macro_step}}},
      {"charge", {{"mode", charge.mode}, {"r0", charge.r0}, {"measure_time", charge.measure_time}}},
      {"evolving",
       {{"epsilon", evolving.epsilon},
        {"tunnel", evolving.tunnel},
        {"duration", evolving.duration},
        {"method", evolving.method},
        {"ordering", evolving.ordering},
        {"c", evolving.c}}},
      {"phase", {{"p_t", phase.p_t}, {"phi", phase.phi}}},
      {"multiqubit", {{"qubits", multiqubit.qubits}, {"gamma", multiqubit.gamma}, {"min_effect", multiqubit.min_effect}}},
      {"analytics", {{"r0", analytics.r0}, {"t_max", analytics.t_max}, {"points", analytics.points}}},
      {"sweep",
       {{"experiment", qundo::to_string(sweep.experiment)}, {"parameter", sweep.parameter}, {"values", values}}},
  };
}

void ExperimentConfig::validate() const {
  const bool ensemble = kind != ExperimentKind::kAnalytics && kind != ExperimentKind::kSweep;
  if (ensemble && runs == 0) throw ValidationError("runs: must be positive");
  if (runs > 1'000'000'000) throw ValidationError("runs: at most 1e9");
  detector.validate();
  trajectory.validate();
  if (!state.diagonal && !state.amplitudes && !state.matrix &&
      std::find(kPresets.begin(), kPresets.end(), state.preset) == kPresets.end()) {
    throw ValidationError("state: unknown preset '" + state.preset + "'");
  }
  if (charge.mode != "wait-and-stop" && charge.mode != "measure-then-undo") {
    throw ValidationError("charge.mode: expected wait-and-stop or measure-then-undo");
  }
  check_finite(charge.r0, "charge.r0");
  if (!(charge.measure_time >= 0.0) || !std::isfinite(charge.measure_time)) {
    throw ValidationError("charge.measure_time: must be finite and non-negative");
  }
  if (evolving.method != "optimal" && evolving.method != "two-step") {
    throw ValidationError("evolving.method: expected optimal or two-step");
  }
  if (evolving.ordering != "minus-first" && evolving.ordering != "plus-first") {
    throw ValidationError("evolving.ordering: expected minus-first or plus-first");
  }
  check_finite(evolving.epsilon, "evolving.epsilon");
  check_finite(evolving.tunnel, "evolving.tunnel");
  if (!(evolving.c > 0.0) || !std::isfinite(evolving.c)) throw ValidationError("evolving.c: must be positive");
  evolving_trajectory(*this).validate();
  PhaseMeasurementParams{phase.p_t, phase.phi}.validate();
  if (multiqubit.qubits < 1 || multiqubit.qubits > kMaxQubits) {
    throw ValidationError("multiqubit.qubits: must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }
  if (!(multiqubit.gamma > 0.0) || !std::isfinite(multiqubit.gamma)) {
    throw ValidationError("multiqubit.gamma: must be positive");
  }
  if (!(multiqubit.min_effect > 1e-12 && multiqubit.min_effect <= 1.0)) {
    throw ValidationError("multiqubit.min_effect: must lie in (1e-12, 1]");
  }
  if (analytics.r0.empty()) throw ValidationError("analytics.r0: at least one value required");
  for (double r : analytics.r0) check_finite(r, "analytics.r0");
  if (!(analytics.t_max > 0.0) || !std::isfinite(analytics.t_max)) {
    throw ValidationError("analytics.t_max: must be positive");
  }
  if (analytics.points < 1 || analytics.points > 1'000'000) {
    throw ValidationError("analytics.points: must lie in [1, 1e6]");
  }
  if (sweep.experiment == ExperimentKind::kSweep) throw ValidationError("sweep.experiment: sweeps do not nest");
  for (double v : sweep.values) check_finite(v, "sweep.values");
  if (kind == ExperimentKind::kSweep) {
    // Resolving the parameter up front catches typos before any work is done.
    ExperimentConfig probe = *this;
    probe.kind = sweep.experiment;
    probe.sweep.values.clear();
    const Json doc = probe.to_json();
    const Json::json_pointer ptr = parameter_pointer(sweep.parameter);
    if (!doc.contains(ptr) || !doc.at(ptr).is_number()) {
      throw ValidationError("sweep.parameter: '" + sweep.parameter + "' is not a numeric setting");
    }
    for (double v : sweep.values) (void)probe.with_parameter(sweep.parameter, v);
  }
}

ExperimentConfig ExperimentConfig::with_parameter(const std::string& dotted, double value) const {
  Json doc = to_json();
  const Json::json_pointer ptr = parameter_pointer(dotted);
  if (dotted.empty() || dotted.rfind("sweep", 0) == 0 || !doc.contains(ptr) || !doc.at(ptr).is_number()) {
    throw ValidationError("sweep.parameter: '" + dotted + "' is not a numeric setting");
  }
  if (doc.at(ptr).is_number_unsigned()) {
    if (!(value >= 0.0) || value != std::floor(value) || value > 9.0e15) {
      throw ValidationError("sweep.parameter: '" + dotted + "' takes non-negative integers");
    }
    doc[ptr] = static_cast<std::uint64_t>(value);
  } else {
    doc[ptr] = value;
  }
  return from_json(doc);
}

RunOutput run_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  switch (config.kind) {
    case ExperimentKind::kChargeQnd: return run_charge(config, workers);
    case ExperimentKind::kChargeEvolving: return run_evolving(config, workers);
    case ExperimentKind::kPhase: return run_phase(config, workers);
    case ExperimentKind::kMultiqubit: return run_multiqubit(config, workers);
    case ExperimentKind::kAnalytics: return run_analytics(config);
    case ExperimentKind::kSweep: return run_sweep(config, workers);
  }
  throw ValidationError("kind: unsupported");
}

// ----------------------------------------------------------- formatting

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << csv_field(table.columns[i]);
  }
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\r\n";
  }
  return out.str();
}

Json to_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      std::visit([&](const auto& v) { obj[table.columns[i]] = v; }, row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return Json{{"columns", table.columns}, {"rows", rows}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("output: cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("output: write failed for " + path.string());
}

void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& config, const RunOutput& out,
                   OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("output: cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "config.json", dump(config.to_json()));
  write_text(dir / "summary.json", dump(out.summary));
  if (format == OutputFormat::kCsv) {
    write_text(dir / "results.csv", to_csv(out.table));
  } else {
    write_text(dir / "results.json", dump(to_json(out.table)));
  }
}

// ---------------------------------------------------------------- checks

Json rate_check(const std::string& name, std::uint64_t successes, std::uint64_t trials, double reference) {
  const BernoulliEstimate e = bernoulli_estimate(successes, trials);
  return Json{{"name", name},   {"successes", successes}, {"trials", trials}, {"estimate", e.p_hat},
              {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"reference", reference},
              {"pass", e.contains(reference)}};
}

Json mean_check(const std::string& name, const std::vector<double>& samples, double reference) {
  const MomentSummary m = moment_summary(samples);
  return Json{{"name", name},
              {"samples", m.samples},
              {"estimate", m.mean},
              {"standard_error", m.standard_error},
              {"std", m.std},
              {"mode", m.mode},
              {"reference", reference},
              {"pass", std::abs(m.mean - reference) <= kDefaultZ * m.standard_error}};
}

Json bound_check(const std::string& name, double value, double tolerance) {
  return Json{{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", value <= tolerance}};
}

Json ks_check(const std::string& name, const std::vector<double>& samples, double reference_r0,
              const DetectorParams& detector, double limit) {
  const double tm = detector.measurement_time();
  const EcdfComparison k = ks_distance(
      samples, [&](double t) { return waiting_time_cdf(t * tm, reference_r0, detector); },
      "conditional first-passage CDF, r0=" + format_double(reference_r0));
  return Json{{"name", name},         {"samples", k.samples}, {"statistic", k.statistic},
              {"limit", limit},       {"reference", k.reference}, {"pass", k.statistic <= limit}};
}

bool all_pass(const Json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Json& c) { return c.at("pass").get<bool>(); });
}

}  // namespace qundo
