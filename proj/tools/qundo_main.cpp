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

// qundo: command-line front end for the measurement-reversal simulators.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qundo/acceptance.hpp"
#include "qundo/errors.hpp"
#include "qundo/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitAcceptance = 4;

int report(const char* kind, const std::string& message, int code) {
  const qundo::Json doc{{"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}};
  std::cerr << doc.dump() << "\n";
  return code;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  std::string format = "csv";
  std::vector<int> only;
};

void add_common(CLI::App* sub, Options& o, bool config_required, const std::string& default_out) {
  auto* cfg = sub->add_option("--config", o.config, "Experiment configuration (JSON)")->envname("QUNDO_CONFIG");
  if (config_required) cfg->required();
  sub->add_option("--seed", o.seed, "Master seed, overrides the configuration")->envname("QUNDO_SEED");
  sub->add_option("--workers", o.workers, "Worker threads; results do not depend on it")
      ->envname("QUNDO_WORKERS")
      ->check(CLI::Range(1u, 4096u));
  o.out = default_out;
  sub->add_option("--out", o.out, "Output directory")->envname("QUNDO_OUT")->capture_default_str();
  sub->add_option("--format", o.format, "Table format")
      ->envname("QUNDO_FORMAT")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

int run_config(qundo::ExperimentConfig config, const Options& o) {
  if (o.seed) config.seed = *o.seed;
  config.validate();
  const qundo::RunOutput out = qundo::run_experiment(config, o.workers);
  qundo::write_outputs(o.out, config, out, qundo::parse_format(o.format));
  std::printf("%s: %s, results in %s\n", qundo::to_string(config.kind),
              out.summary.at("pass").get<bool>() ? "all checks passed" : "some checks failed", o.out.c_str());
  return 0;
}

int selftest(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(qundo::kSelftestSeed);
  auto start = std::chrono::steady_clock::now();
  const auto results = qundo::run_selftest(seed, o.workers, o.only, [&](const qundo::CriterionResult& r) {
    const auto now = std::chrono::steady_clock::now();
    std::printf("criterion %d: %s  %s (%.1f s)\n", r.id, r.passed ? "PASS" : "FAIL", r.title.c_str(),
                std::chrono::duration<double>(now - start).count());
    std::fflush(stdout);
    start = now;
  });
  qundo::write_selftest(o.out, seed, results);
  for (const auto& r : results) {
    if (!r.passed) return kExitAcceptance;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and analytic toolkit for undoing partial quantum measurements"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qundo::kVersion);

  Options run_opts, sweep_opts, analytics_opts, test_opts;
  auto* run = app.add_subcommand("run", "Run the experiment described by a configuration file");
  add_common(run, run_opts, true, "qundo-run");
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep (kind \"sweep\")");
  add_common(sweep, sweep_opts, true, "qundo-sweep");
  auto* analytics = app.add_subcommand("analytics", "Tabulate analytic waiting-time curves");
  add_common(analytics, analytics_opts, false, "qundo-analytics");
  auto* test = app.add_subcommand("selftest", "Run the acceptance suite");
  add_common(test, test_opts, false, "qundo-selftest");
  test->add_option("--only", test_opts.only, "Criterion ids to run (default: all)")
      ->check(CLI::Range(1, qundo::kCriteriaCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("config", e.what(), kExitConfig);
  }

  try {
    if (run->parsed()) return run_config(qundo::ExperimentConfig::load(run_opts.config), run_opts);
    if (sweep->parsed()) {
      const auto config = qundo::ExperimentConfig::load(sweep_opts.config);
      if (config.kind != qundo::ExperimentKind::kSweep) {
        throw qundo::ValidationError("sweep: configuration kind must be \"sweep\"");
      }
      return run_config(config, sweep_opts);
    }
    if (analytics->parsed()) {
      qundo::ExperimentConfig config;
      config.kind = qundo::ExperimentKind::kAnalytics;
      if (!analytics_opts.config.empty()) {
        config = qundo::ExperimentConfig::load(analytics_opts.config);
        if (config.kind != qundo::ExperimentKind::kAnalytics) {
          throw qundo::ValidationError("analytics: configuration kind must be \"analytics\"");
        }
      }
      return run_config(config, analytics_opts);
    }
    if (!test_opts.config.empty()) throw qundo::ValidationError("selftest: takes no configuration file");
    return selftest(test_opts);
  } catch (const qundo::ValidationError& e) {
    return report("config", e.what(), kExitConfig);
  } catch (const qundo::NumericError& e) {
    return report("numeric", e.what(), kExitNumeric);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
}
