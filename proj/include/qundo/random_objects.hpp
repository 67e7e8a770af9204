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

// Seeded random states and measurement operators.

#include <cstddef>

#include "qundo/matkernel.hpp"
#include "qundo/qmeas.hpp"
#include "qundo/rng.hpp"

namespace qundo {

/// Haar-distributed unitary: Gram-Schmidt on a complex Ginibre matrix.
CMatrix random_unitary(std::size_t dim, NoiseStream& stream);

CVector random_pure_amplitudes(std::size_t dim, NoiseStream& stream);

QuantumState random_pure_state(std::size_t dim, NoiseStream& stream);

/// Hilbert-Schmidt random density matrix of full rank.
QuantumState random_mixed_state(std::size_t dim, NoiseStream& stream);

/// M = U diag(sqrt p) W with Haar U, W; p uniform on [min_effect, 1] and the
/// largest set to 1.
KrausOperator random_kraus(std::size_t dim, double min_effect, NoiseStream& stream);

}  // namespace qundo
