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

#include "qundo/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qundo/errors.hpp"

namespace qundo {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kDegenerateRelTol = 1e-12;
constexpr int kMaxJacobiSweeps = 100;

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                          "x" + std::to_string(b.cols()));
  }
}

// Modified Gram-Schmidt (two passes) of v against the accepted set.
// Returns false if v is (numerically) inside their span.
bool orthonormalize_against(CVector& v, const std::vector<CVector>& accepted) {
  const double start = norm(v);
  if (start == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (const CVector& q : accepted) {
      const Complex c = inner(q, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
  const double n = norm(v);
  if (n <= 1e-8 * start) return false;
  for (Complex& x : v) x /= n;
  return true;
}

// Fixes the eigenvectors of each degenerate cluster by projecting canonical
// basis vectors (in index order) onto the cluster's span.
void canonicalize_degenerate(HermEig& e) {
  const std::size_t n = e.values.size();
  double scale = 0.0;
  for (double v : e.values) scale = std::max(scale, std::abs(v));
  const double tol = kDegenerateRelTol * scale;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && e.values[end] - e.values[end - 1] <= tol) ++end;
    const std::size_t k = end - start;
    if (k > 1) {
      std::vector<CVector> span;
      for (std::size_t c = start; c < end; ++c) span.push_back(e.vectors.col(c));
      std::vector<CVector> chosen;
      for (std::size_t j = 0; j < n && chosen.size() < k; ++j) {
        CVector proj(n, 0.0);
        for (const CVector& b : span) {
          const Complex c = std::conj(b[j]);
          for (std::size_t i = 0; i < n; ++i) proj[i] += b[i] * c;
        }
        if (orthonormalize_against(proj, chosen)) chosen.push_back(std::move(proj));
      }
      const double mean =
          std::accumulate(e.values.begin() + start, e.values.begin() + end, 0.0) / k;
      for (std::size_t c = 0; c < k; ++c) {
        e.vectors.set_col(start + c, chosen[c]);
        e.values[start + c] = mean;
      }
    }
    start = end;
  }
}

HermEig eig_2x2(const CMatrix& a) {
  const double p = a(0, 0).real();
  const double q = a(1, 1).real();
  const Complex b = 0.5 * (a(0, 1) + std::conj(a(1, 0)));
  const double mean = 0.5 * (p + q);
  const double half_diff = 0.5 * (p - q);
  const double radius = std::hypot(half_diff, std::abs(b));
  HermEig e;
  e.values = {mean - radius, mean + radius};
  e.vectors = CMatrix::identity(2);
  const double scale = std::max(std::abs(e.values[0]), std::abs(e.values[1]));
  if (2.0 * radius <= kDegenerateRelTol * scale || std::abs(b) == 0.0) {
    if (std::abs(b) == 0.0 && p > q) {
      // Already diagonal: keep the canonical vectors, just order them.
      e.vectors = CMatrix{{0, 1}, {1, 0}};
    }
    if (2.0 * radius <= kDegenerateRelTol * scale) {
      e.vectors = CMatrix::identity(2);
      e.values = {mean, mean};
    }
    return e;
  }
  const double theta = 0.5 * std::atan2(2.0 * std::abs(b), p - q);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex phase = std::polar(1.0, -std::arg(b));
  // Column 1 (larger eigenvalue) is D*(c, s), column 0 is D*(-s, c),
  // with D = diag(1, e^{-i arg b}).
  e.vectors(0, 0) = -s;
  e.vectors(1, 0) = phase * c;
  e.vectors(0, 1) = c;
  e.vectors(1, 1) = phase * s;
  return e;
}

HermEig eig_jacobi(const CMatrix& input) {
  const std::size_t n = input.rows();
  CMatrix a = hermitian_part(input);
  CMatrix v = CMatrix::identity(n);
  double frob = 0.0;
  for (const Complex& z : a.entries()) frob += std::norm(z);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off <= 1e-32 * frob) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        const double mag = std::abs(b);
        if (mag == 0.0) continue;
        const double theta = 0.5 * std::atan2(2.0 * mag, a(p, p).real() - a(q, q).real());
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const Complex ph = std::polar(1.0, -std::arg(b));
        const Complex j00 = c, j01 = -s, j10 = ph * s, j11 = ph * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * j00 + akq * j10;
          a(k, q) = akp * j01 + akq * j11;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * j00 + vkq * j10;
          v(k, q) = vkp * j01 + vkq * j11;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(j00) * apk + std::conj(j10) * aqk;
          a(q, k) = std::conj(j01) * apk + std::conj(j11) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  HermEig e;
  e.values.resize(n);
  e.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    e.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) e.vectors(i, k) = v(i, order[k]);
  }
  return e;
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw ValidationError("CMatrix: expected " + std::to_string(rows_ * cols_) +
                          " entries, got " + std::to_string(entries_.size()));
  }
  if (!all_finite()) throw ValidationError("CMatrix: non-finite entry");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("CMatrix: ragged row list");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw ValidationError("CMatrix: non-finite entry");
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::column(std::span<const Complex> v) {
  return CMatrix(v.size(), 1, std::vector<Complex>(v.begin(), v.end()));
}

CMatrix CMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
  CMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

Complex CMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const Complex& z : entries_) m = std::max(m, std::abs(z));
  return m;
}

bool CMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

CVector CMatrix::col(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

void CMatrix::set_col(std::size_t c, std::span<const Complex> v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = v[i];
}

CVector CMatrix::diag() const {
  CVector d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_shape(*this, o, "CMatrix::operator+");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_shape(*this, o, "CMatrix::operator-");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (Complex& z : entries_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw ValidationError("CMatrix product: inner dimensions " + std::to_string(a.cols_) +
                          " and " + std::to_string(b.rows_));
  }
  CMatrix m(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
    }
  }
  return m;
}

CVector operator*(const CMatrix& m, std::span<const Complex> v) {
  if (m.cols() != v.size()) throw ValidationError("matrix-vector product: dimension mismatch");
  CVector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw ValidationError("inner: dimension mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

CVector normalized(std::span<const Complex> v) {
  const double n = norm(v);
  if (n == 0.0) throw ValidationError("normalized: zero vector");
  CVector out(v.begin(), v.end());
  for (Complex& z : out) z /= n;
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

double hermiticity_defect(const CMatrix& a) {
  if (!a.square()) throw ValidationError("hermiticity_defect: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

double unitarity_defect(const CMatrix& u) {
  return max_abs_diff(u.adjoint() * u, CMatrix::identity(u.cols()));
}

CMatrix hermitian_part(const CMatrix& a) {
  CMatrix h = a + a.adjoint();
  h *= 0.5;
  return h;
}

CMatrix HermEig::reconstruct() const {
  CMatrix d = CMatrix::diagonal(std::span<const double>(values));
  return vectors * d * vectors.adjoint();
}

HermEig herm_eig(const CMatrix& a) {
  if (!a.square() || a.empty()) throw ValidationError("herm_eig: matrix must be square and non-empty");
  if (!a.all_finite()) throw ValidationError("herm_eig: non-finite entry");
  const double defect = hermiticity_defect(a);
  if (defect > kHermitianTol * std::max(1.0, a.max_abs())) {
    throw ValidationError("herm_eig: matrix not Hermitian (defect " + std::to_string(defect) + ")");
  }
  if (a.rows() == 1) {
    HermEig e;
    e.values = {a(0, 0).real()};
    e.vectors = CMatrix::identity(1);
    return e;
  }
  HermEig e = a.rows() == 2 ? eig_2x2(a) : eig_jacobi(a);
  canonicalize_degenerate(e);
  return e;
}

CMatrix Svd::reconstruct() const {
  return u * CMatrix::diagonal(std::span<const double>(sigma)) * v;
}

Svd svd(const CMatrix& m) {
  if (!m.square() || m.empty()) throw ValidationError("svd: matrix must be square and non-empty");
  const std::size_t n = m.rows();
  HermEig e = herm_eig(hermitian_part(m.adjoint() * m));
  Svd out;
  out.sigma.assign(n, 0.0);
  CMatrix w(n, n);
  for (std::size_t k = 0; k < n; ++k) w.set_col(k, e.vectors.col(n - 1 - k));
  std::vector<CVector> left;
  std::vector<double> raw(n);
  for (std::size_t k = 0; k < n; ++k) raw[k] = norm(m * std::span<const Complex>(w.col(k)));
  const double top = raw[0];
  for (std::size_t k = 0; k < n; ++k) {
    CVector x = m * std::span<const Complex>(w.col(k));
    if (raw[k] <= 1e-13 * top || raw[k] == 0.0) break;
    if (!orthonormalize_against(x, left)) break;
    left.push_back(std::move(x));
    out.sigma[k] = raw[k];
  }
  out.u = complete_unitary(left, n);
  out.v = w.adjoint();
  return out;
}

CMatrix u2_exp(double epsilon, double tunnel, double duration) {
  if (!std::isfinite(epsilon) || !std::isfinite(tunnel) || !std::isfinite(duration)) {
    throw ValidationError("u2_exp: non-finite parameter");
  }
  const double omega = std::hypot(0.5 * epsilon, tunnel);
  const double phase = omega * duration;
  const double c = std::cos(phase);
  // sin(omega t)/omega, finite as omega -> 0
  const double s_over = omega * std::abs(duration) < 1e-8
                            ? duration * (1.0 - phase * phase / 6.0)
                            : std::sin(phase) / omega;
  const Complex mi(0.0, -1.0);
  // H = [[-eps/2, tunnel], [tunnel, eps/2]]
  CMatrix u{{c + mi * s_over * (-0.5 * epsilon), mi * s_over * tunnel},
            {mi * s_over * tunnel, c + mi * s_over * (0.5 * epsilon)}};
  return u;
}

CMatrix basis_to_all_ones(std::size_t index, std::size_t dim) {
  if (dim == 0 || index >= dim) {
    throw ValidationError("basis_to_all_ones: index " + std::to_string(index) +
                          " out of range for dimension " + std::to_string(dim));
  }
  CMatrix p = CMatrix::identity(dim);
  if (index != dim - 1) {
    p(index, index) = 0.0;
    p(dim - 1, dim - 1) = 0.0;
    p(dim - 1, index) = 1.0;
    p(index, dim - 1) = 1.0;
  }
  return p;
}

CMatrix inverse(const CMatrix& m) {
  if (!m.square() || m.empty()) throw ValidationError("inverse: matrix must be square");
  const std::size_t n = m.rows();
  CMatrix a = m;
  CMatrix inv = CMatrix::identity(n);
  const double scale = m.max_abs();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= 1e-14 * scale) {
      throw NumericError("inverse: matrix is numerically singular");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(pivot, j), a(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const Complex d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = a(r, col);
      if (f == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

CMatrix complete_unitary(const std::vector<CVector>& columns, std::size_t dim) {
  std::vector<CVector> basis;
  for (const CVector& c : columns) {
    if (c.size() != dim) throw ValidationError("complete_unitary: column dimension mismatch");
    CVector v = c;
    if (!orthonormalize_against(v, basis)) {
      throw ValidationError("complete_unitary: columns are not linearly independent");
    }
    basis.push_back(std::move(v));
  }
  for (std::size_t j = 0; j < dim && basis.size() < dim; ++j) {
    CVector e(dim, 0.0);
    e[j] = 1.0;
    if (orthonormalize_against(e, basis)) basis.push_back(std::move(e));
  }
  CMatrix u(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) u.set_col(k, basis[k]);
  return u;
}

}  // namespace qundo
