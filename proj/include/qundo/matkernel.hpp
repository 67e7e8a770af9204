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

// Dense complex linear algebra at qubit-register scale (dimension up to 64).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qundo {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Row-major dense complex matrix. Entries are always finite.
class CMatrix {
 public:
  CMatrix() = default;
  /// Zero matrix.
  CMatrix(std::size_t rows, std::size_t cols);
  /// Throws ValidationError if the entry count or finiteness is wrong.
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Row-list literal, e.g. CMatrix{{1, 0}, {0, 1}}.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> diag);
  static CMatrix diagonal(std::span<const double> diag);
  /// Single column built from a vector.
  static CMatrix column(std::span<const Complex> v);
  /// |v><v|
  static CMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  std::span<const Complex> entries() const { return entries_; }

  CMatrix adjoint() const;
  Complex trace() const;
  double max_abs() const;
  bool all_finite() const;
  CVector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const Complex> v);
  CVector diag() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

CVector operator*(const CMatrix& m, std::span<const Complex> v);

/// <a|b> (conjugate-linear in the first argument).
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double norm(std::span<const Complex> v);
CVector normalized(std::span<const Complex> v);

/// max_ij |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const CMatrix& a, const CMatrix& b);
/// max_ij |A - A^dagger|
double hermiticity_defect(const CMatrix& a);
/// max_ij |U^dagger U - 1|
double unitarity_defect(const CMatrix& u);
/// (A + A^dagger) / 2
CMatrix hermitian_part(const CMatrix& a);

struct HermEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // orthonormal columns, vectors.col(k) <-> values[k]

  CMatrix reconstruct() const;
};

/// Eigendecomposition of a Hermitian matrix. Closed form for 2x2, cyclic
/// Jacobi otherwise. Eigenvalues closer than 1e-12 (relative to the matrix
/// scale) are treated as degenerate and their eigenvectors are fixed by
/// Gram-Schmidt over the canonical basis in index order.
HermEig herm_eig(const CMatrix& a);

struct Svd {
  CMatrix u;                   // unitary
  std::vector<double> sigma;   // descending, >= 0
  CMatrix v;                   // unitary; m = u * diag(sigma) * v

  CMatrix reconstruct() const;
};

/// Singular value decomposition of a square matrix through herm_eig(M^dagger M).
/// Left vectors belonging to (near-)zero singular values are completed to a
/// unitary by Gram-Schmidt.
Svd svd(const CMatrix& m);

/// exp(-i * duration * (-(epsilon/2) sigma_z + tunnel * sigma_x)), hbar = 1.
CMatrix u2_exp(double epsilon, double tunnel, double duration);

/// Permutation unitary P with P|index> = |dim-1> (the all-ones register
/// state) and P|dim-1> = |index>; identity elsewhere.
CMatrix basis_to_all_ones(std::size_t index, std::size_t dim);

/// Inverse by Gauss-Jordan elimination with partial pivoting. Throws
/// NumericError for a numerically singular matrix.
CMatrix inverse(const CMatrix& m);

/// f(A) = V f(Lambda) V^dagger for Hermitian A.
template <typename F>
CMatrix herm_function(const CMatrix& a, F&& f) {
  HermEig e = herm_eig(a);
  const std::size_t n = a.rows();
  CMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = e.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += vik * std::conj(e.vectors(j, k));
      }
    }
  }
  return out;
}

/// Orthonormal completion: returns a unitary whose first columns.size()
/// columns are the given orthonormal vectors; the rest come from
/// Gram-Schmidt over the canonical basis.
CMatrix complete_unitary(const std::vector<CVector>& columns, std::size_t dim);

}  // namespace qundo
