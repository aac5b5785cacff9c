#include <gtest/gtest.h>

#include "phmor/linalg.hpp"

namespace phmor {
namespace {

TEST(SymEig, KnownSpectrum) {
  RealMatrix m(2, 2);
  m << 2, 1, 1, 2;
  const SymEig e = sym_eig(m);
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 3.0, 1e-14);
  EXPECT_NEAR((m * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 0.0, 1e-13);
  EXPECT_NEAR(min_sym_eigenvalue(m), 1.0, 1e-14);
}

TEST(SymEig, RejectsAsymmetricInput) {
  RealMatrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(sym_eig(m), Error);
}

TEST(Svd, ReconstructsAndRanks) {
  RealMatrix a = RealMatrix::Random(6, 2);
  RealMatrix b = RealMatrix::Random(2, 5);
  const RealMatrix m = a * b;
  const Svd d = svd(m);
  RealMatrix s = RealMatrix::Zero(6, 5);
  for (Eigen::Index i = 0; i < d.singular_values.size(); ++i) s(i, i) = d.singular_values(i);
  EXPECT_NEAR((d.U * s * d.V.transpose() - m).norm(), 0.0, 1e-12);
  EXPECT_EQ(numerical_rank(m), 2);
}

TEST(Subspaces, NullspaceAndRange) {
  RealMatrix m(2, 4);
  m << 1, 0, 1, 0,
       0, 1, 0, 1;
  const RealMatrix k = nullspace_basis(m);
  ASSERT_EQ(k.cols(), 2);
  EXPECT_NEAR((m * k).norm(), 0.0, 1e-14);
  EXPECT_NEAR((k.transpose() * k - RealMatrix::Identity(2, 2)).norm(), 0.0, 1e-14);
  EXPECT_EQ(left_nullspace_basis(m).cols(), 0);
  EXPECT_EQ(range_basis(m).cols(), 2);
  EXPECT_EQ(nullspace_basis(RealMatrix(0, 3)).cols(), 3);
}

TEST(SolveComplex, MatchesKnownSolution) {
  ComplexMatrix m(2, 2);
  m << Complex(1, 1), 2, 0, Complex(0, 3);
  ComplexMatrix x(2, 1);
  x << Complex(1, -1), Complex(2, 0.5);
  EXPECT_NEAR((solve_complex(m, m * x) - x).norm(), 0.0, 1e-14);
}

TEST(SolveComplex, EquilibrationHandlesWildScaling) {
  ComplexMatrix m(2, 2);
  m << 1e-200, 1e-200, 0, 1e200;
  ComplexMatrix rhs(2, 1);
  rhs << 2e-200, 1e200;
  const ComplexMatrix x = solve_complex(m, rhs);
  EXPECT_NEAR(std::abs(x(0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(x(1) - 1.0), 0.0, 1e-14);
}

TEST(SolveComplex, SingularThrows) {
  ComplexMatrix m(2, 2);
  m << 1, 2, 2, 4;
  EXPECT_THROW(solve_complex(m, ComplexMatrix::Ones(2, 1)), SingularMatrixError);
  EXPECT_THROW(solve_complex(ComplexMatrix::Ones(2, 3), ComplexMatrix::Ones(2, 1)), DimensionError);
}

TEST(SolveReal, SingularThrows) {
  EXPECT_THROW(solve_real(RealMatrix::Zero(3, 3), RealMatrix::Ones(3, 1)), SingularMatrixError);
}

TEST(GenEig, DiagonalPencil) {
  RealMatrix a(2, 2), e(2, 2);
  a << -1, 0, 0, -2;
  e << 2, 0, 0, 1;
  const GenEig g = gen_eig(a, e);
  // A v = lambda E v: lambda = -1/2 and -2, sorted ascending by real part.
  EXPECT_NEAR(std::abs(g.values(0) - Complex(-2.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(g.values(1) - Complex(-0.5, 0.0)), 0.0, 1e-14);
  const ComplexMatrix bio = g.left.transpose() * e.cast<Complex>() * g.right;
  EXPECT_NEAR((bio - ComplexMatrix::Identity(2, 2)).norm(), 0.0, 1e-13);
}

TEST(GenEig, ComplexPairBiorthogonal) {
  RealMatrix a(3, 3), e = RealMatrix::Identity(3, 3);
  a << -1, 2, 0, -2, -1, 0, 0, 0, -3;
  e(2, 2) = 4.0;
  const GenEig g = gen_eig(a, e);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const ComplexVector res = a.cast<Complex>() * g.right.col(k) - g.values(k) * e.cast<Complex>() * g.right.col(k);
    EXPECT_LT(res.norm(), 1e-12);
  }
  EXPECT_NEAR((g.left.transpose() * e.cast<Complex>() * g.right - ComplexMatrix::Identity(3, 3)).norm(), 0.0, 1e-12);
  EXPECT_THROW(gen_eig(a, -e), NotPositiveDefiniteError);
}

TEST(Orthonormalize, DropsDependentColumns) {
  RealMatrix v(4, 3);
  v << 1, 2, 0,
       0, 0, 1,
       1, 2, 0,
       0, 0, 1;
  const Orthonormalized o = orthonormalize_columns(v);
  EXPECT_EQ(o.dropped, 1);
  ASSERT_EQ(o.q.cols(), 2);
  EXPECT_NEAR((o.q.transpose() * o.q - RealMatrix::Identity(2, 2)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((v * o.transform - o.q).norm(), 0.0, 1e-13);
}

TEST(Format, CompactNumbers) {
  EXPECT_EQ(num(0.5), "0.5");
  EXPECT_EQ(num(1e-8), "1e-08");
  EXPECT_EQ(num(123456.0), "1.23e+05");
}

}  // namespace
}  // namespace phmor
