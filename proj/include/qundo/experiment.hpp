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

// Configured Monte Carlo experiments and analytic tables, with the result
// files the command-line tool writes for them.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qundo/charge_analytics.hpp"
#include "qundo/matkernel.hpp"
#include "qundo/qmeas.hpp"
#include "qundo/rng.hpp"
#include "qundo/trajectory.hpp"

namespace qundo {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind { kChargeQnd, kChargeEvolving, kPhase, kMultiqubit, kAnalytics, kSweep };
enum class OutputFormat { kCsv, kJson };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);
OutputFormat parse_format(const std::string& name);

/// Initial state: a named preset, a diagonal qubit state, explicit pure
/// amplitudes or an explicit density matrix. Presets: mixed, one, two, plus,
/// minus-i, random-pure, random-mixed.
struct StateSpec {
  std::string preset = "mixed";
  std::optional<double> diagonal;
  std::optional<CVector> amplitudes;
  std::optional<CMatrix> matrix;

  /// Random presets draw from `stream`, so they are fixed by the run seed.
  QuantumState resolve(std::size_t dim, NoiseStream& stream) const;
};

struct ChargeSettings {
  std::string mode = "wait-and-stop";  // or measure-then-undo
  double r0 = 1.0;
  double measure_time = 1.0;  // first measurement, units of T_M
};

struct EvolvingSettings {
  double epsilon = 1.0;
  double tunnel = 1.0;
  double duration = 2.0;
  std::string method = "optimal";  // or two-step
  std::string ordering = "minus-first";
  double c = 1.0;
};

struct PhaseSettings {
  double p_t = 0.5;
  double phi = 0.0;
};

struct MultiqubitSettings {
  std::size_t qubits = 2;
  double gamma = 1.0;
  double min_effect = 0.2;
};

struct AnalyticsSettings {
  std::vector<double> r0{0.25, 0.5, 1.0, 2.0, 4.0};
  double t_max = 10.0;  // units of T_M
  std::size_t points = 400;
};

struct SweepSettings {
  ExperimentKind experiment = ExperimentKind::kChargeQnd;
  std::string parameter = "charge.measure_time";
  std::vector<double> values;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kChargeQnd;
  std::uint64_t seed = 1;
  std::uint64_t runs = 10000;
  StateSpec state;
  DetectorParams detector;
  TrajectoryConfig trajectory;
  ChargeSettings charge;
  EvolvingSettings evolving;
  PhaseSettings phase;
  MultiqubitSettings multiqubit;
  AnalyticsSettings analytics;
  SweepSettings sweep;

  /// Rejects unknown keys at every level.
  static ExperimentConfig from_json(const Json& doc);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Effective configuration with every default filled in.
  Json to_json() const;
  void validate() const;
  /// Copy with one numeric field replaced; `dotted` names it as in the file,
  /// e.g. "phase.p_t".
  ExperimentConfig with_parameter(const std::string& dotted, double value) const;
};

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunOutput {
  Json summary;
  Table table;
};

RunOutput run_experiment(const ExperimentConfig& config, unsigned workers);

/// Writes config.json, summary.json and results.csv or results.json.
void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& config, const RunOutput& out,
                   OutputFormat format);

// Shared formatting helpers; doubles are printed with 17 significant digits.
std::string format_double(double v);
std::string to_csv(const Table& table);
Json to_json(const Table& table);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& doc);

// Summary entries. Each carries a "pass" flag.
Json rate_check(const std::string& name, std::uint64_t successes, std::uint64_t trials, double reference);
Json mean_check(const std::string& name, const std::vector<double>& samples, double reference);
Json bound_check(const std::string& name, double value, double tolerance);
Json ks_check(const std::string& name, const std::vector<double>& samples, double reference_r0,
              const DetectorParams& detector, double limit);
bool all_pass(const Json& checks);

}  // namespace qundo
