#pragma once

// Dense real/complex linear-algebra kernels. Backed by Eigen; every routine is a
// pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phmor/error.hpp"

namespace phmor {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

/// Relative rank tolerance max(rows, cols) * eps, to be scaled by the largest singular value.
inline double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max<Eigen::Index>({rows, cols, 1})) * kEpsilon;
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const std::string& name) {
  if (!m.allFinite()) throw Error(name + " contains NaN or Inf entries");
}

inline void require_square(const RealMatrix& m, const std::string& name) {
  if (m.rows() != m.cols()) {
    throw DimensionError(name + " must be square, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

inline RealMatrix sym_part(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }
inline RealMatrix skew_part(const RealMatrix& m) { return 0.5 * (m - m.transpose()); }

/// Frobenius norm, returning 1 for empty/zero inputs so it is safe as a denominator.
template <class Derived>
double scale_of(const Eigen::MatrixBase<Derived>& m) {
  const double n = m.size() == 0 ? 0.0 : m.norm();
  return n > 0.0 ? n : 1.0;
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition

struct SymEig {
  RealVector values;   // ascending
  RealMatrix vectors;  // orthonormal columns
};

/// Eigendecomposition of a (numerically) symmetric matrix. The input is
/// symmetrized before factorization; an asymmetry above `tol * ||M||_F` is an error.
inline SymEig sym_eig(const RealMatrix& m, double tol = 1e-10) {
  require_square(m, "sym_eig input");
  if (m.size() == 0) return {RealVector(0), RealMatrix(0, 0)};
  const double asym = (m - m.transpose()).norm();
  if (asym > tol * scale_of(m)) {
    throw Error("sym_eig input is not symmetric (||M - M^T||_F = " + num(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym_part(m));
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Smallest eigenvalue of the symmetric part of `m`; +inf for an empty matrix.
inline double min_sym_eigenvalue(const RealMatrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym_part(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// Singular value decomposition

struct Svd {
  RealMatrix U;
  RealVector singular_values;  // descending, nonnegative
  RealMatrix V;
};

/// Full SVD, M = U * diag(s) * V^T with square U and V.
inline Svd svd(const RealMatrix& m) {
  if (m.size() == 0) {
    return {RealMatrix::Identity(m.rows(), m.rows()), RealVector(0),
            RealMatrix::Identity(m.cols(), m.cols())};
  }
  Eigen::BDCSVD<RealMatrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) throw ConvergenceError("SVD did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Number of singular values above `rel_tol * s_max` (default rel_tol: max(rows,cols)*eps).
inline Eigen::Index numerical_rank(const RealVector& singular_values, double rel_tol) {
  if (singular_values.size() == 0 || singular_values(0) <= 0.0) return 0;
  const double threshold = rel_tol * singular_values(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > threshold) ++rank;
  }
  return rank;
}

inline Eigen::Index numerical_rank(const RealMatrix& m, double rel_tol = -1.0) {
  if (m.size() == 0) return 0;
  if (rel_tol < 0.0) rel_tol = default_rank_tol(m.rows(), m.cols());
  Eigen::BDCSVD<RealMatrix> dec(m);
  return numerical_rank(RealVector(dec.singularValues()), rel_tol);
}

/// Orthonormal basis of the right nullspace of `m` (S_inf(M) in pencil terminology).
/// `rel_tol < 0` selects the default rank tolerance.
inline RealMatrix nullspace_basis(const RealMatrix& m, double rel_tol = -1.0) {
  if (m.cols() == 0) return RealMatrix(0, 0);
  if (m.rows() == 0) return RealMatrix::Identity(m.cols(), m.cols());
  if (rel_tol < 0.0) rel_tol = default_rank_tol(m.rows(), m.cols());
  const Svd d = svd(m);
  const Eigen::Index rank = numerical_rank(d.singular_values, rel_tol);
  return d.V.rightCols(m.cols() - rank);
}

/// Orthonormal basis of the left nullspace of `m` (T_inf(M)).
inline RealMatrix left_nullspace_basis(const RealMatrix& m, double rel_tol = -1.0) {
  return nullspace_basis(m.transpose(), rel_tol);
}

/// Orthonormal basis of the column range of `m`.
inline RealMatrix range_basis(const RealMatrix& m, double rel_tol = -1.0) {
  if (m.size() == 0) return RealMatrix(m.rows(), 0);
  if (rel_tol < 0.0) rel_tol = default_rank_tol(m.rows(), m.cols());
  const Svd d = svd(m);
  return d.U.leftCols(numerical_rank(d.singular_values, rel_tol));
}

// ---------------------------------------------------------------------------
// Linear solves

namespace detail {

/// Nearest power of two to 1/x, so that scaling is exact in floating point.
inline double pow2_reciprocal(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return 1.0;
  return std::ldexp(1.0, -std::ilogb(x));
}

}  // namespace detail

/// Solve M X = RHS for square complex M by partial-pivot LU after row and column
/// equilibration with powers of two. Throws SingularMatrixError when the reciprocal
/// condition estimate of the equilibrated matrix falls below n*eps.
inline ComplexMatrix solve_complex(const ComplexMatrix& m, const ComplexMatrix& rhs) {
  if (m.rows() != m.cols()) throw DimensionError("solve_complex: matrix must be square");
  if (rhs.rows() != m.rows()) throw DimensionError("solve_complex: right-hand side row mismatch");
  const Eigen::Index n = m.rows();
  if (n == 0) return ComplexMatrix(0, rhs.cols());
  RealVector dr(n), dc(n);
  for (Eigen::Index i = 0; i < n; ++i) dr(i) = detail::pow2_reciprocal(m.row(i).cwiseAbs().maxCoeff());
  const ComplexMatrix mr = dr.cast<Complex>().asDiagonal() * m;
  for (Eigen::Index j = 0; j < n; ++j) dc(j) = detail::pow2_reciprocal(mr.col(j).cwiseAbs().maxCoeff());
  const ComplexMatrix ms = mr * dc.cast<Complex>().asDiagonal();
  Eigen::PartialPivLU<ComplexMatrix> lu(ms);
  const double rcond = lu.rcond();
  if (!(rcond > static_cast<double>(n) * kEpsilon)) {
    throw SingularMatrixError("solve_complex: matrix is singular to working precision", rcond);
  }
  return dc.cast<Complex>().asDiagonal() * lu.solve(dr.cast<Complex>().asDiagonal() * rhs);
}

inline RealMatrix solve_real(const RealMatrix& m, const RealMatrix& rhs) {
  if (m.rows() != m.cols()) throw DimensionError("solve_real: matrix must be square");
  if (rhs.rows() != m.rows()) throw DimensionError("solve_real: right-hand side row mismatch");
  if (m.rows() == 0) return RealMatrix(0, rhs.cols());
  Eigen::PartialPivLU<RealMatrix> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > static_cast<double>(m.rows()) * kEpsilon)) {
    throw SingularMatrixError("solve_real: matrix is singular to working precision", rcond);
  }
  return lu.solve(rhs);
}

/// 2-norm condition number via singular values; +inf when singular.
inline double condition_number(const RealMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::BDCSVD<RealMatrix> dec(m);
  const RealVector s = dec.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

// ---------------------------------------------------------------------------
// Generalized eigenproblem A v = lambda E v with E symmetric positive definite

struct GenEig {
  ComplexVector values;
  ComplexMatrix right;  // columns v_i
  ComplexMatrix left;   // columns w_i, with w_i^T E v_j = delta_ij (plain transpose)
  double eigenvector_condition = 1.0;
  std::vector<std::string> warnings;
};

/// Eigenvector condition above which the pencil is flagged as (nearly) defective.
inline constexpr double kDefectiveConditionThreshold = 1e10;

/// Right and left eigenvectors of the pencil (A, E), E = E^T > 0. The problem is
/// reduced to a standard one through the Cholesky factor of E. Eigenvalues are
/// sorted by (real, imag) ascending.
inline GenEig gen_eig(const RealMatrix& a, const RealMatrix& e) {
  require_square(a, "gen_eig A");
  require_square(e, "gen_eig E");
  if (a.rows() != e.rows()) throw DimensionError("gen_eig: A and E differ in size");
  const Eigen::Index n = a.rows();
  GenEig out;
  if (n == 0) {
    out.values.resize(0);
    out.right.resize(0, 0);
    out.left.resize(0, 0);
    return out;
  }
  if ((e - e.transpose()).norm() > 1e-10 * scale_of(e)) {
    throw NotPositiveDefiniteError("gen_eig: E is not symmetric");
  }
  Eigen::LLT<RealMatrix> llt(sym_part(e));
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("gen_eig: E is not positive definite");
  const RealMatrix l = llt.matrixL();
  // C = L^{-1} A L^{-T}
  RealMatrix c = llt.matrixL().solve(a);
  c = llt.matrixL().solve(c.transpose()).transpose();

  Eigen::EigenSolver<RealMatrix> es(c, true);
  if (es.info() != Eigen::Success) throw ConvergenceError("gen_eig: eigensolver did not converge");
  ComplexVector lambda = es.eigenvalues();
  ComplexMatrix y = es.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (lambda(i).real() != lambda(j).real()) return lambda(i).real() < lambda(j).real();
    return lambda(i).imag() < lambda(j).imag();
  });
  ComplexVector sorted_values(n);
  ComplexMatrix sorted_y(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sorted_values(k) = lambda(order[static_cast<std::size_t>(k)]);
    sorted_y.col(k) = y.col(order[static_cast<std::size_t>(k)]);
  }

  Eigen::PartialPivLU<ComplexMatrix> lu(sorted_y);
  const double rcond = lu.rcond();
  out.eigenvector_condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (out.eigenvector_condition > kDefectiveConditionThreshold) {
    out.warnings.push_back("gen_eig: eigenvector matrix is ill conditioned (cond ~ " +
                           num(out.eigenvector_condition) +
                           "); pencil may be defective");
  }
  const ComplexMatrix y_inv = lu.inverse();
  const ComplexMatrix lc = l.cast<Complex>();
  // v = L^{-T} y,   w^T = (row of Y^{-1}) L^{-1}  =>  W = L^{-T} Y^{-T}
  out.right = lc.transpose().triangularView<Eigen::Upper>().solve(sorted_y);
  out.left = lc.transpose().triangularView<Eigen::Upper>().solve(ComplexMatrix(y_inv.transpose()));
  out.values = sorted_values;
  return out;
}

// ---------------------------------------------------------------------------
// Rank-revealing orthonormalization

struct Orthonormalized {
  RealMatrix q;          // n x k, orthonormal columns
  RealMatrix transform;  // cols(V) x k with V * transform == q (up to round-off)
  Eigen::Index dropped = 0;
  double gap_ratio = 0.0;  // |R_kk| / |R_11| of the last kept pivot
};

/// Orthonormalize the columns of `v` with column-pivoted Householder QR.
/// Pivots below `rel_tol * |R_11|` are dropped. The returned transform lets
/// callers carry quantities attached to the columns of `v` along.
inline Orthonormalized orthonormalize_columns(const RealMatrix& v, double rel_tol = 1e-12) {
  Orthonormalized out;
  if (v.cols() == 0 || v.rows() == 0) {
    out.q = RealMatrix(v.rows(), 0);
    out.transform = RealMatrix(v.cols(), 0);
    out.dropped = v.cols();
    return out;
  }
  Eigen::ColPivHouseholderQR<RealMatrix> qr(v);
  const RealMatrix r = qr.matrixR().template triangularView<Eigen::Upper>();
  const Eigen::Index kmax = std::min(v.rows(), v.cols());
  const double r11 = std::abs(r(0, 0));
  Eigen::Index k = 0;
  if (r11 > 0.0) {
    while (k < kmax && std::abs(r(k, k)) > rel_tol * r11) ++k;
  }
  out.dropped = v.cols() - k;
  out.gap_ratio = k > 0 ? std::abs(r(k - 1, k - 1)) / r11 : 0.0;
  const RealMatrix q_full = qr.householderQ() * RealMatrix::Identity(v.rows(), k);
  out.q = q_full;
  // V P = Q R  =>  V P[:, :k] R11^{-1} = Q[:, :k]
  const RealMatrix r11_block = r.topLeftCorner(k, k);
  const RealMatrix r11_inv =
      r11_block.triangularView<Eigen::Upper>().solve(RealMatrix::Identity(k, k));
  const RealMatrix perm = qr.colsPermutation() * RealMatrix::Identity(v.cols(), v.cols());
  out.transform = perm.leftCols(k) * r11_inv;
  return out;
}

}  // namespace phmor
