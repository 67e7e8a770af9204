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

#include "qundo/random_objects.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

Complex complex_normal(NoiseStream& stream) {
  const double re = stream.normal();
  const double im = stream.normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

}  // namespace

CMatrix random_unitary(std::size_t dim, NoiseStream& stream) {
  if (dim == 0) throw ValidationError("random_unitary: dimension must be positive");
  std::vector<CVector> cols(dim, CVector(dim));
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r) cols[c][r] = complex_normal(stream);
  CMatrix q(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    CVector v = cols[c];
    // Two Gram-Schmidt passes keep the columns orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < c; ++k) {
        const CVector qk = q.col(k);
        const Complex proj = inner(qk, v);
        for (std::size_t r = 0; r < dim; ++r) v[r] -= proj * qk[r];
      }
    }
    const double n = norm(v);
    for (Complex& z : v) z /= n;
    q.set_col(c, v);
  }
  return q;
}

CVector random_pure_amplitudes(std::size_t dim, NoiseStream& stream) {
  CVector v(dim);
  for (Complex& z : v) z = complex_normal(stream);
  return normalized(v);
}

QuantumState random_pure_state(std::size_t dim, NoiseStream& stream) {
  return QuantumState::from_pure(random_pure_amplitudes(dim, stream));
}

QuantumState random_mixed_state(std::size_t dim, NoiseStream& stream) {
  CMatrix g(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) g(r, c) = complex_normal(stream);
  return normalize_state(g * g.adjoint());
}

KrausOperator random_kraus(std::size_t dim, double min_effect, NoiseStream& stream) {
  if (!(min_effect > 0.0 && min_effect <= 1.0)) throw ValidationError("random_kraus: min_effect must lie in (0, 1]");
  const CMatrix u = random_unitary(dim, stream);
  const CMatrix w = random_unitary(dim, stream);
  std::vector<double> s(dim);
  for (double& x : s) x = min_effect + (1.0 - min_effect) * stream.uniform();
  const double top = *std::max_element(s.begin(), s.end());
  for (double& x : s) x = std::sqrt(x / top);
  return KrausOperator(u * CMatrix::diagonal(std::span<const double>(s)) * w);
}

}  // namespace qundo
