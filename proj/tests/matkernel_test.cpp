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

#include <Eigen/Dense>
#include <cmath>
#include <gtest/gtest.h>
#include <numbers>

#include "qundo/errors.hpp"
#include "qundo/random_objects.hpp"
#include "qundo/rng.hpp"

namespace qundo {
namespace {

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const CMatrix& m) {
  EMat e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

CMatrix random_matrix(std::size_t n, NoiseStream& s) {
  CMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = Complex(s.normal(), s.normal());
  return m;
}

CMatrix random_hermitian(std::size_t n, NoiseStream& s) {
  const CMatrix b = random_matrix(n, s);
  return b + b.adjoint();
}

TEST(CMatrix, RejectsBadShapeAndNonFinite) {
  EXPECT_THROW(CMatrix(2, 2, std::vector<Complex>(3)), ValidationError);
  EXPECT_THROW(CMatrix(1, 1, {Complex(std::nan(""), 0.0)}), ValidationError);
}

TEST(CMatrix, ProductMatchesEigen) {
  NoiseStream s(1, 0);
  const CMatrix a = random_matrix(4, s);
  const CMatrix b = random_matrix(4, s);
  const EMat expected = to_eigen(a) * to_eigen(b);
  EXPECT_LT((to_eigen(a * b) - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(HermEig, IdentityAndDiagonal) {
  const HermEig id = herm_eig(CMatrix::identity(2));
  EXPECT_DOUBLE_EQ(id.values[0], 1.0);
  EXPECT_DOUBLE_EQ(id.values[1], 1.0);
  EXPECT_LT(unitarity_defect(id.vectors), 1e-15);

  const HermEig d = herm_eig(CMatrix{{0.25, 0.0}, {0.0, 1.0}});
  EXPECT_DOUBLE_EQ(d.values[0], 0.25);
  EXPECT_DOUBLE_EQ(d.values[1], 1.0);
  EXPECT_NEAR(std::abs(d.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(d.vectors(1, 1)), 1.0, 1e-15);
}

TEST(HermEig, RandomMatricesReconstructAndMatchEigen) {
  NoiseStream s(2, 0);
  for (std::size_t n : {2u, 3u, 4u, 8u, 16u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix a = random_hermitian(n, s);
      const HermEig e = herm_eig(a);
      EXPECT_LE(max_abs_diff(e.reconstruct(), a), 1e-12 * a.max_abs()) << n;
      EXPECT_LE(unitarity_defect(e.vectors), 1e-12) << n;
      Eigen::SelfAdjointEigenSolver<EMat> oracle(to_eigen(a));
      for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(e.values[k], oracle.eigenvalues()(k), 1e-12 * a.max_abs());
      }
    }
  }
}

TEST(HermEig, DegenerateSpectrum) {
  NoiseStream s(3, 0);
  const CMatrix u = random_unitary(4, s);
  const std::vector<double> d{1.0, 1.0, 2.0, 2.0};
  const CMatrix a = u * CMatrix::diagonal(std::span<const double>(d)) * u.adjoint();
  const HermEig e = herm_eig(hermitian_part(a));
  EXPECT_LE(max_abs_diff(e.reconstruct(), a), 1e-12 * a.max_abs());
  EXPECT_LE(unitarity_defect(e.vectors), 1e-12);
}

TEST(HermEig, RejectsNonHermitian) {
  EXPECT_THROW(herm_eig(CMatrix{{1.0, 1.0}, {0.0, 1.0}}), ValidationError);
}

TEST(Svd, UnitaryHasUnitSingularValues) {
  NoiseStream s(4, 0);
  const Svd d = svd(random_unitary(3, s));
  for (double x : d.sigma) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Svd, DiagonalPositive) {
  const double r = 1.3;
  const Svd d = svd(CMatrix{{std::exp(r / 2), 0.0}, {0.0, std::exp(-r / 2)}});
  EXPECT_NEAR(d.sigma[0], std::exp(r / 2), 1e-14);
  EXPECT_NEAR(d.sigma[1], std::exp(-r / 2), 1e-14);
}

TEST(Svd, RandomMatricesMatchEigen) {
  NoiseStream s(5, 0);
  for (std::size_t n : {2u, 3u, 4u, 8u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix m = random_matrix(n, s);
      const Svd d = svd(m);
      EXPECT_LE(max_abs_diff(d.reconstruct(), m), 1e-11);
      EXPECT_LE(unitarity_defect(d.u), 1e-12);
      EXPECT_LE(unitarity_defect(d.v), 1e-12);
      for (std::size_t k = 1; k < n; ++k) EXPECT_GE(d.sigma[k - 1], d.sigma[k]);
      Eigen::JacobiSVD<EMat> oracle(to_eigen(m));
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(d.sigma[k], oracle.singularValues()(k), 1e-11);
    }
  }
}

TEST(Svd, RankDeficient) {
  const CMatrix m{{1.0, 2.0}, {2.0, 4.0}};
  const Svd d = svd(m);
  EXPECT_NEAR(d.sigma[1], 0.0, 1e-12);
  EXPECT_LE(max_abs_diff(d.reconstruct(), m), 1e-11);
  EXPECT_LE(unitarity_defect(d.u), 1e-12);
}

TEST(U2Exp, MatchesMatrixExponential) {
  const double eps = 0.7;
  const double h = -1.1;
  const double t = 2.3;
  const CMatrix u = u2_exp(eps, h, t);
  EXPECT_LE(unitarity_defect(u), 1e-13);
  EMat hq(2, 2);
  hq << -eps / 2, h, h, eps / 2;
  const Eigen::SelfAdjointEigenSolver<EMat> es(hq);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  const EMat expected = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  EXPECT_LT((to_eigen(u) - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(U2Exp, ZeroHamiltonianAndPiPulse) {
  EXPECT_LE(max_abs_diff(u2_exp(0.0, 0.0, 5.0), CMatrix::identity(2)), 1e-15);
  const CMatrix x = u2_exp(0.0, 1.0, std::numbers::pi / 2);
  const CMatrix expected{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, -1.0), 0.0}};
  EXPECT_LE(max_abs_diff(x, expected), 1e-15);
}

TEST(BasisToAllOnes, MapsIndexToLastState) {
  for (std::size_t i = 0; i < 8; ++i) {
    const CMatrix p = basis_to_all_ones(i, 8);
    EXPECT_LE(unitarity_defect(p), 0.0);
    EXPECT_EQ(p(7, i), Complex(1.0, 0.0));
  }
  EXPECT_THROW(basis_to_all_ones(8, 8), ValidationError);
}

TEST(Inverse, RandomAndSingular) {
  NoiseStream s(6, 0);
  const CMatrix m = random_matrix(5, s);
  EXPECT_LE(max_abs_diff(m * inverse(m), CMatrix::identity(5)), 1e-12);
  EXPECT_THROW(inverse(CMatrix{{1.0, 2.0}, {2.0, 4.0}}), NumericError);
}

TEST(CompleteUnitary, ExtendsColumns) {
  const CVector a{std::sqrt(0.5), Complex(0.0, std::sqrt(0.5)), 0.0};
  const CMatrix u = complete_unitary({a}, 3);
  EXPECT_LE(unitarity_defect(u), 1e-14);
  EXPECT_LE(max_abs_diff(CMatrix::column(u.col(0)), CMatrix::column(a)), 1e-15);
}

}  // namespace
}  // namespace qundo
