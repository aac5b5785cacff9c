#pragma once

// Structure-preserving interpolatory reducers.

#include <variant>

#include "phmor/interpolation.hpp"
#include "phmor/reduced_model.hpp"

namespace phmor {

/// One-sided projection (V^T E V, V^T A V, V^T B, C V, D).
inline GenericLTISystem galerkin(const GenericLTISystem& sys, const RealMatrix& v) {
  sys.check();
  if (v.rows() != sys.n()) throw DimensionError("galerkin: basis row count must equal n");
  return {v.transpose() * sys.E * v, v.transpose() * sys.A * v, v.transpose() * sys.B, sys.C * v, sys.D};
}

namespace detail {

inline void finish_ph_flags(ReducedModel& red, const ReducerOptions& opt) {
  red.min_eig_W = passivity_min_eig(red.system);
  red.ph_valid = red.min_eig_W >= -opt.ph_tol;
}

inline void require_columns(const ProjectionBasis& basis, const char* who) {
  if (basis.V.cols() == 0) {
    throw DegenerateBasisError(std::string(who) + ": interpolation basis is zero (degenerate data or fully constrained states)");
  }
}

}  // namespace detail

/// Index-1 reduction with the constant polynomial term shifted into the dynamics.
/// With K = (B2 + P2)^T A22^{-1} (B2 - P2) and direction matrix Bd:
///   Er = V^T E V, Ar = V^T A V - Bd^T K Bd, Bcr = V^T Bc + Bd^T K, Ccr = Cc V + K Bd, Dr = D - K.
/// The result always interpolates; ph_valid reports whether W_r is semidefinite.
inline ReducedModel reduce_index1_shifted(const Index1Partition& part, const InterpolationData& data,
                                          const ReducerOptions& opt = {}) {
  const PHDAESystem& sys = part.system();
  const GenericLTISystem g = as_generic(sys);
  const ProjectionBasis basis = build_V_generic(g, data, opt);
  detail::require_columns(basis, "reduce_index1_shifted");
  const RealMatrix& v = basis.V;
  const RealMatrix& bd = basis.directions;
  const RealMatrix c2 = (part.B2() + part.P2()).transpose();
  const RealMatrix k = c2 * solve_real(part.A22(), RealMatrix(part.B2() - part.P2()));

  const RealMatrix er = v.transpose() * sys.E() * v;
  const RealMatrix ar = v.transpose() * g.A * v - bd.transpose() * k * bd;
  const RealMatrix br = v.transpose() * g.B + bd.transpose() * k;
  const RealMatrix cr = g.C * v + k * bd;
  const RealMatrix dr = g.D - k;

  ReducedModel red;
  red.system = ph_from_generic(er, ar, br, cr, dr);
  red.method = ReductionMethod::index1_shifted;
  red.polynomial = {dr, RealMatrix::Zero(sys.m(), sys.m())};
  red.blocks = {v.cols()};
  red.basis = v;
  red.warnings = basis.warnings;
  detail::finish_ph_flags(red, opt);
  return red;
}

/// Index-1 reduction with V_hat = diag(V1, I): the algebraic block is kept.
inline ReducedModel reduce_index1_blockdiag(const Index1Partition& part, const InterpolationData& data,
                                            const ReducerOptions& opt = {}) {
  const PHDAESystem& sys = part.system();
  ReducerOptions raw_opt = opt;
  raw_opt.normalization = BasisNormalization::raw;
  const ProjectionBasis full = build_V_generic(as_generic(sys), data, raw_opt);
  const Eigen::Index n1 = part.n1(), n2 = part.n2();
  RealMatrix v1 = full.V.topRows(n1);
  ReducedModel red;
  red.warnings = full.warnings;
  if (opt.normalization == BasisNormalization::orthonormal) {
    const Orthonormalized q = orthonormalize_columns(v1, opt.rank_tol);
    if (q.dropped > 0) {
      red.warnings.push_back("V1 is rank deficient; " + std::to_string(q.dropped) + " column(s) dropped");
    }
    v1 = q.q;
  }
  if (v1.cols() == 0) throw DegenerateBasisError("reduce_index1_blockdiag: V1 block is zero");
  const Eigen::Index r = v1.cols();
  RealMatrix vhat = RealMatrix::Zero(n1 + n2, r + n2);
  vhat.topLeftCorner(n1, r) = v1;
  vhat.bottomRightCorner(n2, n2).setIdentity();
  red.system = congruence(sys, vhat);
  red.method = ReductionMethod::index1_blockdiag;
  red.polynomial = polynomial_part_index1(part);
  red.blocks = {r, n2};
  red.basis = v1;
  detail::finish_ph_flags(red, opt);
  return red;
}

/// Index-2 reduction for B2 = P2 = 0: saddle-point basis V in ker J12^T and
/// congruence with [V; 0]. W_r stays semidefinite by construction.
inline ReducedModel reduce_index2_zeroB2(const Index2Partition& part, const InterpolationData& data,
                                         const ReducerOptions& opt = {}) {
  if (!part.b2_zero()) {
    throw StructureError("B2 = P2 = 0", "input enters the constraint rows; use reduce_index2_nonzeroB2");
  }
  const PHDAESystem& sys = part.system();
  const ProjectionBasis basis = build_V_saddle(part, data, opt);
  detail::require_columns(basis, "reduce_index2_zeroB2");
  const Eigen::Index r = basis.V.cols();
  RealMatrix vhat = RealMatrix::Zero(sys.n(), r);
  vhat.topRows(part.n1()) = basis.V;
  ReducedModel red;
  red.system = congruence(sys, vhat);
  red.method = ReductionMethod::index2_zero_b2;
  red.polynomial = polynomial_part_index2(part);
  red.blocks = {r};
  red.basis = basis.V;
  red.warnings = basis.warnings;
  detail::finish_ph_flags(red, opt);
  return red;
}

/// Index-2 reduction when the input reaches the constraint. The reduced model
/// takes (u, u') as input: Hr(s) = Cr (sEr - Ar)^{-1} Br + D0 + s D1.
inline ReducedModel reduce_index2_nonzeroB2(const Index2Partition& part, const InterpolationData& data,
                                            const ReducerOptions& opt = {}) {
  if (part.b2_zero()) {
    ReducedModel red = reduce_index2_zeroB2(part, data, opt);
    red.feedthrough_rate = RealMatrix::Zero(red.ports(), red.ports());
    return red;
  }
  const Index2Shift sh = index2_shift(part);
  const ProjectionBasis basis = build_V_saddle(part, data, opt, &sh.input_map);
  detail::require_columns(basis, "reduce_index2_nonzeroB2");
  const RealMatrix& v = basis.V;
  const RealMatrix er = v.transpose() * part.E11() * v;
  const RealMatrix ar = v.transpose() * part.A11() * v;
  const RealMatrix bt = v.transpose() * sh.input_map;
  const RealMatrix ct = sh.output_map * v;

  ReducedModel red;
  red.system = ph_from_generic(er, ar, bt, ct, sh.D0);
  red.method = ReductionMethod::index2_nonzero_b2;
  red.polynomial = {sh.D0, sh.D1};
  red.augmented_input = true;
  red.feedthrough_rate = sh.D1;
  red.blocks = {v.cols()};
  red.basis = v;
  red.warnings = basis.warnings;
  detail::finish_ph_flags(red, opt);
  return red;
}

/// Mixed index-1/index-2 reduction with V_hat = diag(I, V2, I).
inline ReducedModel reduce_mixed(const MixedPartition& part, const InterpolationData& data,
                                 const ReducerOptions& opt = {}) {
  const PHDAESystem& sys = part.system();
  const Eigen::Index n1 = part.n1(), n2 = part.n2(), n3 = part.n3();
  ReducedModel red;
  RealMatrix v2(n2, 0);
  if (n2 > 0) {
    ReducerOptions raw_opt = opt;
    raw_opt.normalization = BasisNormalization::raw;
    const ProjectionBasis full = build_V_generic(as_generic(sys), data, raw_opt);
    red.warnings = full.warnings;
    v2 = full.V.middleRows(n1, n2);
    if (opt.normalization == BasisNormalization::orthonormal) {
      const Orthonormalized q = orthonormalize_columns(v2, opt.rank_tol);
      if (q.dropped > 0) {
        red.warnings.push_back("V2 is rank deficient; " + std::to_string(q.dropped) + " column(s) dropped");
      }
      v2 = q.q;
    }
    if (v2.cols() == 0) throw DegenerateBasisError("reduce_mixed: V2 block is zero");
  } else {
    detail::require_data(data, sys.m());
  }
  const Eigen::Index r = v2.cols();
  RealMatrix vhat = RealMatrix::Zero(sys.n(), n1 + r + n3);
  vhat.topLeftCorner(n1, n1).setIdentity();
  vhat.block(n1, n1, n2, r) = v2;
  vhat.bottomRightCorner(n3, n3).setIdentity();
  red.system = congruence(sys, vhat);
  red.method = ReductionMethod::mixed;
  red.polynomial = {sys.feedthrough(), RealMatrix::Zero(sys.m(), sys.m())};
  red.blocks = {n1, r, n3};
  red.basis = v2;
  detail::finish_ph_flags(red, opt);
  return red;
}

// ---------------------------------------------------------------------------
// Dispatch over partition kinds

using AnyPartition = std::variant<Index1Partition, Index2Partition, MixedPartition>;

inline ReducedModel reduce(const AnyPartition& part, ReductionMethod method, const InterpolationData& data,
                           const ReducerOptions& opt = {}) {
  auto mismatch = [&](const char* kind) {
    return StructureError("reducer applicability", "method " + to_string(method) + " needs a " + kind + " partition");
  };
  switch (method) {
    case ReductionMethod::index1_shifted:
      if (auto* p = std::get_if<Index1Partition>(&part)) return reduce_index1_shifted(*p, data, opt);
      throw mismatch("index-1");
    case ReductionMethod::index1_blockdiag:
      if (auto* p = std::get_if<Index1Partition>(&part)) return reduce_index1_blockdiag(*p, data, opt);
      throw mismatch("index-1");
    case ReductionMethod::index2_zero_b2:
      if (auto* p = std::get_if<Index2Partition>(&part)) return reduce_index2_zeroB2(*p, data, opt);
      throw mismatch("index-2");
    case ReductionMethod::index2_nonzero_b2:
      if (auto* p = std::get_if<Index2Partition>(&part)) return reduce_index2_nonzeroB2(*p, data, opt);
      throw mismatch("index-2");
    case ReductionMethod::mixed:
      if (auto* p = std::get_if<MixedPartition>(&part)) return reduce_mixed(*p, data, opt);
      throw mismatch("mixed");
  }
  throw ArgumentError("unknown reduction method");
}

inline const PHDAESystem& system_of(const AnyPartition& part) {
  return std::visit([](const auto& p) -> const PHDAESystem& { return p.system(); }, part);
}

// ---------------------------------------------------------------------------
// Interpolation check

/// max_i ||H(sigma_i) b_i - Hr(sigma_i) b_i|| / (1 + ||H(sigma_i) b_i||).
inline double interpolation_residual(const TransferFunction& full, const TransferFunction& reduced,
                                     const InterpolationData& data) {
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ComplexVector hb = full(data.points[i]) * data.directions[i];
    const ComplexVector hrb = reduced(data.points[i]) * data.directions[i];
    worst = std::max(worst, (hb - hrb).norm() / (1.0 + hb.norm()));
  }
  return worst;
}

inline double interpolation_residual(const PHDAESystem& full, const ReducedModel& red, const InterpolationData& data) {
  return interpolation_residual(transfer_of(full), red.transfer(), data);
}

// ---------------------------------------------------------------------------
// Explicit projector oracle (verification only; dense and O(n1^3))

struct ProjectorOracle {
  RealMatrix pi_l;  // I - J12 Z J12^T E11^{-1}
  RealMatrix pi_r;  // I - E11^{-1} J12 Z J12^T  (= pi_l^T)
  GenericLTISystem projected;  // (pi_l E11 pi_r, pi_l A11 pi_r, pi_l B1, C1 pi_r, D); singular pencil
  RealMatrix range;            // orthonormal basis of range(pi_r)

  /// The projected system restricted to range(pi_r): a regular ODE with the same transfer function.
  GenericLTISystem restricted() const { return galerkin(projected, range); }
};

inline ProjectorOracle projector_oracle_index2(const Index2Partition& part) {
  if (!part.b2_zero()) throw StructureError("B2 = P2 = 0", "projector oracle needs B2 = P2 = 0");
  const PHDAESystem& sys = part.system();
  const Eigen::Index n1 = part.n1(), n2 = part.n2();
  ProjectorOracle out;
  const RealMatrix id = RealMatrix::Identity(n1, n1);
  if (n2 == 0) {
    out.pi_l = id;
    out.pi_r = id;
  } else {
    const Eigen::LLT<RealMatrix> e11(part.E11());
    const RealMatrix j12 = part.J12();
    const RealMatrix z = solve_real(part.coupling(), RealMatrix::Identity(n2, n2));
    out.pi_l = id - j12 * z * e11.solve(j12).transpose();
    out.pi_r = id - e11.solve(j12) * z * j12.transpose();
  }
  const RealMatrix b1 = part.B1() - part.P1();
  const RealMatrix c1 = (part.B1() + part.P1()).transpose();
  out.projected = {out.pi_l * part.E11() * out.pi_r, out.pi_l * part.A11() * out.pi_r, out.pi_l * b1, c1 * out.pi_r,
                   sys.feedthrough()};
  out.range = range_basis(out.pi_r, 1e-10);
  return out;
}

}  // namespace phmor
