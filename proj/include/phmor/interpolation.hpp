#pragma once

// Interpolation data and interpolatory projection bases.

#include <string>
#include <utility>
#include <vector>

#include "phmor/transfer.hpp"

namespace phmor {

/// Right tangential interpolation data {(sigma_i, b_i)}, closed under conjugation.
struct InterpolationData {
  std::vector<Complex> points;
  std::vector<ComplexVector> directions;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Every point paired with the all-ones direction of length m.
  static InterpolationData with_ones(const std::vector<Complex>& pts, Eigen::Index m) {
    InterpolationData d;
    d.points = pts;
    d.directions.assign(pts.size(), ComplexVector::Ones(m));
    return d;
  }

  /// n log-spaced real points on [lo, hi] with all-ones directions.
  static InterpolationData log_spaced(double lo, double hi, int count, Eigen::Index m) {
    if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw ArgumentError("log_spaced: need count >= 1 and 0 < lo <= hi");
    std::vector<Complex> pts;
    for (int k = 0; k < count; ++k) {
      const double t = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
      pts.emplace_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))), 0.0);
    }
    return with_ones(pts, m);
  }
};

namespace detail {

inline bool is_self_conjugate(Complex s, const ComplexVector& b, double tol) {
  const bool real_point = std::abs(s.imag()) <= tol * (1.0 + std::abs(s));
  const double bn = b.size() == 0 ? 0.0 : b.norm();
  const bool real_dir = b.size() == 0 || b.imag().norm() <= tol * (1.0 + bn);
  return real_point && real_dir;
}

}  // namespace detail

/// Pairs (i, j) of mutually conjugate entries; j == i for real data.
/// Throws ArgumentError when the data is not closed under conjugation.
inline std::vector<std::pair<std::size_t, std::size_t>> conjugate_pairs(const InterpolationData& data,
                                                                        double tol = 1e-12) {
  if (data.points.size() != data.directions.size()) {
    throw DimensionError("interpolation data: point and direction counts differ");
  }
  const std::size_t r = data.points.size();
  std::vector<bool> used(r, false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < r; ++i) {
    if (used[i]) continue;
    const Complex s = data.points[i];
    const ComplexVector& b = data.directions[i];
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || !b.allFinite()) {
      throw ArgumentError("interpolation data: non-finite point or direction at index " + std::to_string(i));
    }
    if (detail::is_self_conjugate(s, b, tol)) {
      used[i] = true;
      out.emplace_back(i, i);
      continue;
    }
    std::size_t partner = r;
    for (std::size_t j = i + 1; j < r; ++j) {
      if (used[j]) continue;
      const bool point_ok = std::abs(data.points[j] - std::conj(s)) <= tol * (1.0 + std::abs(s)) * 10.0;
      const bool dir_ok = data.directions[j].size() == b.size() &&
                          (data.directions[j] - b.conjugate()).norm() <= tol * (1.0 + b.norm()) * 10.0;
      if (point_ok && dir_ok) {
        partner = j;
        break;
      }
    }
    if (partner == r) {
      throw ArgumentError("interpolation data is not closed under conjugation: entry " + std::to_string(i) +
                          " has no conjugate partner");
    }
    used[i] = used[partner] = true;
    out.emplace_back(i, partner);
  }
  return out;
}

enum class BasisNormalization {
  orthonormal,  // rank-revealing QR of the realified basis
  raw           // realified solution vectors used as they are
};

struct ReducerOptions {
  BasisNormalization normalization = BasisNormalization::orthonormal;
  double rank_tol = 1e-12;  // relative pivot threshold for orthonormalization
  double ph_tol = 1e-10;    // min eig(W) >= -ph_tol counts as positive semidefinite
};

/// A real projection basis together with the real direction matrix that
/// transforms with it (needed by the shifted index-1 reduction).
struct ProjectionBasis {
  RealMatrix V;           // n x r
  RealMatrix directions;  // m x r, realified and transformed alongside V
  ComplexMatrix complex_columns;  // the exact interpolation vectors, one per data entry
  Eigen::Index dropped = 0;
  std::vector<std::string> warnings;

  Eigen::Index rank() const { return V.cols(); }
};

namespace detail {

/// Replace each conjugate pair (v, conj v) by (Re v, Im v), real entries by Re v,
/// then orthonormalize unless raw columns are requested.
inline ProjectionBasis finish_basis(ComplexMatrix columns, const InterpolationData& data,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                    const ReducerOptions& opt) {
  const Eigen::Index n = columns.rows();
  const Eigen::Index m = data.directions.empty() ? 0 : data.directions.front().size();
  const Eigen::Index r = static_cast<Eigen::Index>(data.size());
  RealMatrix v(n, r), dirs(m, r);
  Eigen::Index c = 0;
  for (auto [i, j] : pairs) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (i == j) {
      v.col(c) = columns.col(ii).real();
      dirs.col(c) = data.directions[i].real();
      ++c;
    } else {
      v.col(c) = columns.col(ii).real();
      v.col(c + 1) = columns.col(ii).imag();
      dirs.col(c) = data.directions[i].real();
      dirs.col(c + 1) = data.directions[i].imag();
      columns.col(static_cast<Eigen::Index>(j)) = columns.col(ii).conjugate();
      c += 2;
    }
  }
  ProjectionBasis out;
  out.complex_columns = std::move(columns);
  if (opt.normalization == BasisNormalization::raw) {
    out.V = v;
    out.directions = dirs;
    const Eigen::Index rk = v.size() == 0 ? 0 : numerical_rank(v, opt.rank_tol);
    if (rk < r) {
      out.warnings.push_back("raw interpolation basis is rank deficient (rank " + std::to_string(rk) + " of " +
                             std::to_string(r) + ")");
    }
    return out;
  }
  const Orthonormalized q = orthonormalize_columns(v, opt.rank_tol);
  out.V = q.q;
  out.directions = dirs * q.transform;
  out.dropped = q.dropped;
  if (q.dropped > 0) {
    out.warnings.push_back("interpolation basis lost " + std::to_string(q.dropped) +
                           " column(s) to rank truncation; reduced order is " + std::to_string(q.q.cols()));
  }
  return out;
}

inline void require_data(const InterpolationData& data, Eigen::Index m) {
  if (data.empty()) throw ArgumentError("interpolation data is empty: r >= 1 required");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.directions.size() != data.points.size() || data.directions[i].size() != m) {
      throw DimensionError("interpolation direction " + std::to_string(i) + " must have length " +
                           std::to_string(m));
    }
  }
}

}  // namespace detail

/// Columns (sigma_i E - A)^{-1} B b_i, realified and (by default) orthonormalized.
inline ProjectionBasis build_V_generic(const GenericLTISystem& sys, const InterpolationData& data,
                                       const ReducerOptions& opt = {}) {
  sys.check();
  detail::require_data(data, sys.inputs());
  const auto pairs = conjugate_pairs(data);
  const ComplexMatrix e = sys.E.cast<Complex>(), a = sys.A.cast<Complex>(), b = sys.B.cast<Complex>();
  ComplexMatrix cols(sys.n(), static_cast<Eigen::Index>(data.size()));
  for (auto [i, j] : pairs) {
    const Complex s = data.points[i];
    try {
      cols.col(static_cast<Eigen::Index>(i)) = solve_complex(s * e - a, b * data.directions[i]);
    } catch (const SingularMatrixError& err) {
      throw SingularMatrixError("build_V_generic: shifted pencil singular at interpolation point " +
                                    std::to_string(i) + " (sigma = " + num(s.real()) + " + " +
                                    num(s.imag()) + "i)",
                                err.rcond());
    }
    (void)j;
  }
  return detail::finish_basis(std::move(cols), data, pairs, opt);
}

inline ProjectionBasis build_V_generic(const PHDAESystem& sys, const InterpolationData& data,
                                       const ReducerOptions& opt = {}) {
  return build_V_generic(as_generic(sys), data, opt);
}

/// First blocks v_i of
///   [A11 - sigma_i E11   J12] [v_i]   [input_map b_i]
///   [     -J12^T          0 ] [z_i] = [      0      ],
/// where input_map defaults to B1 - P1. Every v_i lies in ker J12^T.
inline ProjectionBasis build_V_saddle(const Index2Partition& part, const InterpolationData& data,
                                      const ReducerOptions& opt = {}, const RealMatrix* input_map = nullptr) {
  const PHDAESystem& sys = part.system();
  detail::require_data(data, sys.m());
  const auto pairs = conjugate_pairs(data);
  const Eigen::Index n1 = part.n1(), n2 = part.n2();
  const RealMatrix b1 = input_map ? *input_map : RealMatrix(part.B1() - part.P1());
  if (b1.rows() != n1 || b1.cols() != sys.m()) throw DimensionError("build_V_saddle: input map has wrong shape");
  const RealMatrix a11 = part.A11();
  const RealMatrix e11 = part.E11();
  const RealMatrix j12 = part.J12();
  ComplexMatrix saddle = ComplexMatrix::Zero(n1 + n2, n1 + n2);
  saddle.topRightCorner(n1, n2) = j12.cast<Complex>();
  saddle.bottomLeftCorner(n2, n1) = -j12.transpose().cast<Complex>();
  ComplexMatrix cols(n1, static_cast<Eigen::Index>(data.size()));
  ComplexVector rhs = ComplexVector::Zero(n1 + n2);
  for (auto [i, j] : pairs) {
    const Complex s = data.points[i];
    saddle.topLeftCorner(n1, n1) = a11.cast<Complex>() - s * e11.cast<Complex>();
    rhs.head(n1) = b1.cast<Complex>() * data.directions[i];
    try {
      cols.col(static_cast<Eigen::Index>(i)) = solve_complex(saddle, rhs).topRows(n1);
    } catch (const SingularMatrixError& err) {
      throw SingularMatrixError("build_V_saddle: saddle system singular at interpolation point " + std::to_string(i),
                                err.rcond());
    }
    (void)j;
  }
  ProjectionBasis out = detail::finish_basis(std::move(cols), data, pairs, opt);
  if (n2 > 0 && out.V.cols() > 0) {
    const double leak = (j12.transpose() * out.V).norm();
    if (leak > 1e-10 * std::max(out.V.norm(), 1e-300)) {
      out.warnings.push_back("saddle basis leaves the constraint kernel (||J12^T V|| = " + num(leak) + ")");
    }
  }
  return out;
}

}  // namespace phmor
