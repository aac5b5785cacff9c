#pragma once

// Reduced models, their proper (ODE) realizations and pole-residue forms.

#include <string>
#include <vector>

#include "phmor/transfer.hpp"

namespace phmor {

enum class ReductionMethod {
  index1_shifted,     // interpolation with the constant term shifted into the dynamics
  index1_blockdiag,   // diag(V1, I): algebraic block kept
  index2_zero_b2,     // saddle-point basis, input does not reach the constraint
  index2_nonzero_b2,  // saddle-point basis with augmented input (u, u')
  mixed               // diag(I, V2, I)
};

inline std::string to_string(ReductionMethod m) {
  switch (m) {
    case ReductionMethod::index1_shifted: return "index1-shifted";
    case ReductionMethod::index1_blockdiag: return "index1-blockdiag";
    case ReductionMethod::index2_zero_b2: return "index2";
    case ReductionMethod::index2_nonzero_b2: return "index2-b2";
    case ReductionMethod::mixed: return "mixed";
  }
  return "unknown";
}

inline ReductionMethod parse_reduction_method(const std::string& s) {
  for (auto m : {ReductionMethod::index1_shifted, ReductionMethod::index1_blockdiag, ReductionMethod::index2_zero_b2,
                 ReductionMethod::index2_nonzero_b2, ReductionMethod::mixed}) {
    if (to_string(m) == s) return m;
  }
  throw ArgumentError("unknown reduction method '" + s + "'");
}

/// Smallest eigenvalue of the symmetrized passivity matrix.
inline double passivity_min_eig(const PHDAESystem& sys) { return min_sym_eigenvalue(sys.passivity_matrix()); }

struct ReducedModel {
  PHDAESystem system;
  ReductionMethod method = ReductionMethod::index2_zero_b2;
  bool ph_valid = false;
  double min_eig_W = 0.0;
  PolynomialPart polynomial;
  bool augmented_input = false;
  RealMatrix feedthrough_rate;       // D1: Hr(s) carries + s D1 (zero unless augmented_input)
  std::vector<Eigen::Index> blocks;  // state block sizes of the reduced system
  RealMatrix basis;                  // projection used, in the coordinates of the reduced block
  std::vector<std::string> warnings;

  Eigen::Index order() const { return system.n(); }
  Eigen::Index ports() const { return system.m(); }

  ComplexMatrix evaluate(Complex s) const {
    ComplexMatrix h = eval(as_generic(system), s);
    if (feedthrough_rate.size() > 0) h += s * feedthrough_rate.cast<Complex>();
    return h;
  }

  TransferFunction transfer() const {
    return [g = as_generic(system), d1 = feedthrough_rate](Complex s) {
      ComplexMatrix h = eval(g, s);
      if (d1.size() > 0) h += s * d1.cast<Complex>();
      return h;
    };
  }

  /// Realization with inputs (u, u'): B = [B - P, 0], D = [D0, D1].
  GenericLTISystem augmented() const {
    GenericLTISystem g = as_generic(system);
    const Eigen::Index m = system.m();
    const RealMatrix d1 = feedthrough_rate.size() > 0 ? feedthrough_rate : RealMatrix::Zero(m, m);
    RealMatrix b(g.B.rows(), 2 * m), d(m, 2 * m);
    b << g.B, RealMatrix::Zero(g.B.rows(), m);
    d << g.D, d1;
    g.B = b;
    g.D = d;
    return g;
  }
};

/// Assemble the pH data (J, R, B, P, S, N) from generic reduced matrices:
/// J = skew(A), R = -sym(A), B = (Bc + Cc^T)/2, P = (Cc^T - Bc)/2, S = sym(D), N = skew(D).
inline PHDAESystem ph_from_generic(const RealMatrix& e, const RealMatrix& a, const RealMatrix& bc,
                                   const RealMatrix& cc, const RealMatrix& d) {
  PHDAEMatrices m;
  m.E = sym_part(e);
  m.J = skew_part(a);
  m.R = -sym_part(a);
  m.B = 0.5 * (bc + cc.transpose());
  m.P = 0.5 * (cc.transpose() - bc);
  m.S = sym_part(d);
  m.N = skew_part(d);
  return PHDAESystem(std::move(m));
}

/// Explicit ODE realization of the reduced model with symmetric positive definite E.
/// The s-linear term D1 is not part of it.
inline GenericLTISystem proper_realization(const ReducedModel& red) {
  const GenericLTISystem g = as_generic(red.system);
  switch (red.method) {
    case ReductionMethod::index1_blockdiag: {
      // [E11 0; 0 0]: Schur complement on the algebraic block.
      const Eigen::Index r = red.blocks.at(0), k = red.order() - r;
      if (k == 0) return g;
      const RealMatrix a22 = g.A.bottomRightCorner(k, k);
      const RealMatrix x_a = solve_real(a22, g.A.bottomLeftCorner(k, r));
      const RealMatrix x_b = solve_real(a22, g.B.bottomRows(k));
      GenericLTISystem out;
      out.E = g.E.topLeftCorner(r, r);
      out.A = g.A.topLeftCorner(r, r) - g.A.topRightCorner(r, k) * x_a;
      out.B = g.B.topRows(r) - g.A.topRightCorner(r, k) * x_b;
      out.C = g.C.leftCols(r) - g.C.rightCols(k) * x_a;
      out.D = g.D - g.C.rightCols(k) * x_b;
      return out;
    }
    case ReductionMethod::mixed: {
      // The constraint forces x1 = 0; x3 is fixed by the first block row.
      const Eigen::Index n1 = red.blocks.at(0), r = red.blocks.at(1);
      GenericLTISystem out;
      out.E = g.E.block(n1, n1, r, r);
      out.A = g.A.block(n1, n1, r, r);
      out.B = g.B.middleRows(n1, r);
      out.C = g.C.middleCols(n1, r);
      out.D = g.D;
      return out;
    }
    default:
      return g;
  }
}

/// Finite poles of the reduced model, sorted by (real, imag).
inline ComplexVector finite_poles(const ReducedModel& red) {
  const GenericLTISystem p = proper_realization(red);
  return gen_eig(p.A, p.E).values;
}

/// Hr(s) = sum_i c_i b_i^T / (s - lambda_i) + D (+ s D1).
struct PoleResidueForm {
  ComplexVector poles;
  ComplexMatrix left;   // m x r, column i = c_i
  ComplexMatrix right;  // m x r, column i = b_i (largest-magnitude entry real positive)
  RealMatrix D;
  RealMatrix D1;
  std::vector<std::string> warnings;

  ComplexMatrix evaluate(Complex s) const {
    ComplexMatrix h = D.cast<Complex>();
    for (Eigen::Index i = 0; i < poles.size(); ++i) h += left.col(i) * right.col(i).transpose() / (s - poles(i));
    if (D1.size() > 0) h += s * D1.cast<Complex>();
    return h;
  }
};

inline PoleResidueForm pole_residue(const GenericLTISystem& p) {
  const GenEig ge = gen_eig(p.A, p.E);
  PoleResidueForm out;
  out.poles = ge.values;
  out.warnings = ge.warnings;
  const Eigen::Index r = ge.values.size();
  out.left = p.C.cast<Complex>() * ge.right;
  out.right = (ge.left.transpose() * p.B.cast<Complex>()).transpose();
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index k = 0;
    const double mx = out.right.col(i).cwiseAbs().maxCoeff(&k);
    if (mx == 0.0) continue;
    const Complex phase = out.right(k, i) / mx;
    out.right.col(i) /= phase;
    out.left.col(i) *= phase;
    out.right(k, i) = Complex(out.right(k, i).real(), 0.0);
  }
  out.D = p.D;
  return out;
}

inline PoleResidueForm pole_residue(const ReducedModel& red) {
  PoleResidueForm out = pole_residue(proper_realization(red));
  out.D1 = red.feedthrough_rate;
  return out;
}

}  // namespace phmor
