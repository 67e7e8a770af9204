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

// Built-in acceptance suite. Each criterion is an independent Monte Carlo or
// algebraic check seeded from the suite seed, so reports are identical for
// any worker count.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qundo/experiment.hpp"

namespace qundo {

inline constexpr std::uint64_t kSelftestSeed = 20100407;
inline constexpr int kCriteriaCount = 9;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  Json details;
};

CriterionResult run_criterion(int id, std::uint64_t seed, unsigned workers);

/// Runs the selected criteria (all when `only` is empty) in id order.
std::vector<CriterionResult> run_selftest(std::uint64_t seed, unsigned workers, const std::vector<int>& only,
                                          const std::function<void(const CriterionResult&)>& on_done = {});

/// criterion_NN.json for each result plus selftest.json.
void write_selftest(const std::filesystem::path& dir, std::uint64_t seed, const std::vector<CriterionResult>& results);

/// Lattice walk with steps of +-0.01 and up-probability 0.505 started at
/// r0, absorbed at 0 or at `ceiling`; every step is drawn.
bool lattice_walk_hits_zero(double r0, double ceiling, NoiseStream& stream);

}  // namespace qundo
