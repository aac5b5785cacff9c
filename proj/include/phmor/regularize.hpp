#pragma once

// Structured regularization: singular-part removal, condensed (staircase) form,
// output-feedback index reduction and rank-condition diagnostics.

#include <array>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "phmor/transfer.hpp"

namespace phmor {

// ---------------------------------------------------------------------------
// Diagnostics

struct RankCheck {
  bool passed = false;
  double gap = 0.0;  // worst sigma_min / sigma_max over all tested instances
  std::string detail;
};

struct DiagnosisReport {
  RankCheck c1, c2, o1, o2;
  bool index_leq1 = false;
  bool pencil_regular = false;
  Complex witness{0.0, 0.0};  // a lambda with lambda E - A nonsingular, when regular
  std::vector<std::string> notes;
};

struct DiagnoseOptions {
  int probes = 16;
  std::uint64_t seed = 1;
  Eigen::Index eigen_cap = 400;  // pencil eigenvalues are added as probes up to this n
};

namespace detail {

/// sigma_needed / max(sigma_1, scale); `scale` lets a projected block be judged against its parent matrix.
inline double rank_gap(const ComplexMatrix& m, Eigen::Index needed, bool* full, double scale = 0.0) {
  if (needed == 0) {
    *full = true;
    return 1.0;
  }
  Eigen::BDCSVD<ComplexMatrix> dec(m);
  const RealVector s = dec.singularValues();
  const double ref = std::max(s.size() ? s(0) : 0.0, scale);
  if (s.size() < needed || ref <= 0.0) {
    *full = false;
    return 0.0;
  }
  const double tol = default_rank_tol(m.rows(), m.cols());
  const double g = s(needed - 1) / ref;
  *full = g > tol;
  return g;
}

inline double rank_gap(const RealMatrix& m, Eigen::Index needed, bool* full, double scale = 0.0) {
  return rank_gap(ComplexMatrix(m.cast<Complex>()), needed, full, scale);
}

}  // namespace detail

/// Rank conditions
///   C1: rank [lambda E - A, B] = n for all finite lambda     (tested at probes + pencil eigenvalues)
///   O1: rank [lambda E - A; C] = n
///   C2: rank [E, A S_inf(E), B] = n
///   O2: rank [E; T_inf(E)^T A; C] = n
/// and the index test: T_inf(E)^T A S_inf(E) square and nonsingular.
inline DiagnosisReport diagnose(const GenericLTISystem& sys, const DiagnoseOptions& opt = {}) {
  sys.check();
  const Eigen::Index n = sys.n();
  DiagnosisReport rep;
  const ComplexMatrix e = sys.E.cast<Complex>(), a = sys.A.cast<Complex>();
  const ComplexMatrix b = sys.B.cast<Complex>(), c = sys.C.cast<Complex>();

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::max(scale_of(sys.A), 1.0) / std::max(scale_of(sys.E), 1e-300);
  std::vector<Complex> probes;
  for (int k = 0; k < opt.probes; ++k) probes.emplace_back(scale * normal(rng), scale * normal(rng));

  // Regularity: lambda E - A nonsingular at some probe.
  for (Complex lam : probes) {
    bool full = false;
    detail::rank_gap(ComplexMatrix(lam * e - a), n, &full);
    if (full) {
      rep.pencil_regular = true;
      rep.witness = lam;
      break;
    }
  }
  if (!rep.pencil_regular) rep.notes.push_back("pencil lambda E - A is singular at every probe");

  if (rep.pencil_regular && n <= opt.eigen_cap && n > 0) {
    Eigen::GeneralizedEigenSolver<RealMatrix> ges(sys.A, sys.E, false);
    if (ges.info() == Eigen::Success) {
      const ComplexVector alphas = ges.alphas();
      const RealVector betas = ges.betas();
      for (Eigen::Index i = 0; i < alphas.size(); ++i) {
        if (std::abs(betas(i)) > 1e-12 * std::max(1.0, std::abs(alphas(i)))) probes.push_back(alphas(i) / betas(i));
      }
    } else {
      rep.notes.push_back("generalized eigensolver failed; C1/O1 tested at random probes only");
    }
  }

  auto check_at_probes = [&](bool controllability) {
    RankCheck rc;
    rc.passed = true;
    rc.gap = 1.0;
    for (Complex lam : probes) {
      ComplexMatrix m;
      if (controllability) {
        m.resize(n, n + sys.inputs());
        m << lam * e - a, b;
      } else {
        m.resize(n + sys.outputs(), n);
        m << lam * e - a, c;
      }
      bool full = false;
      const double g = detail::rank_gap(m, n, &full);
      rc.gap = std::min(rc.gap, g);
      if (!full) {
        rc.passed = false;
        std::ostringstream os;
        os << "rank deficient at lambda = " << lam;
        rc.detail = os.str();
      }
    }
    if (rc.passed) rc.detail = "full rank at " + std::to_string(probes.size()) + " probe(s)";
    return rc;
  };
  rep.c1 = check_at_probes(true);
  rep.o1 = check_at_probes(false);

  const RealMatrix s_inf = nullspace_basis(sys.E);
  const RealMatrix t_inf = left_nullspace_basis(sys.E);
  {
    RealMatrix m(n, n + s_inf.cols() + sys.inputs());
    m << sys.E, sys.A * s_inf, sys.B;
    bool full = false;
    rep.c2.gap = detail::rank_gap(m, n, &full);
    rep.c2.passed = full;
    rep.c2.detail = "rank [E, A S_inf, B] test, sigma_n / sigma_1 = " + num(rep.c2.gap);
  }
  {
    RealMatrix m(n + t_inf.cols() + sys.outputs(), n);
    m << sys.E, t_inf.transpose() * sys.A, sys.C;
    bool full = false;
    rep.o2.gap = detail::rank_gap(m, n, &full);
    rep.o2.passed = full;
    rep.o2.detail = "rank [E; T_inf^T A; C] test, sigma_n / sigma_1 = " + num(rep.o2.gap);
  }
  if (s_inf.cols() == 0) {
    rep.index_leq1 = true;
  } else if (s_inf.cols() == t_inf.cols()) {
    const RealMatrix core = t_inf.transpose() * sys.A * s_inf;
    bool full = false;
    detail::rank_gap(core, core.rows(), &full, sys.A.norm());
    rep.index_leq1 = full;
  }
  return rep;
}

inline DiagnosisReport diagnose(const PHDAESystem& sys, const DiagnoseOptions& opt = {}) {
  return diagnose(as_generic(sys), opt);
}

// ---------------------------------------------------------------------------
// Singular-part removal

struct SingularPartRemoval {
  PHDAESystem system;          // (x1, x2) subsystem
  Eigen::Index dropped = 0;    // size of the removed x3 block
  Eigen::Index n_regular = 0;  // size of x1
  Eigen::Index n_input_only = 0;  // size of x2 (zero E, J, R rows; B2 full row rank)
  RealMatrix transform;        // orthogonal n x n, columns ordered (x1, x2, x3)
};

/// Removes the part of the state space in the common kernel of E, J and R that
/// the input does not reach. States in that kernel which the input does reach
/// are kept as the x2 block with B2 row-compressed to full row rank.
inline SingularPartRemoval remove_singular_part(const PHDAESystem& sys, double rel_tol = -1.0) {
  const Eigen::Index n = sys.n();
  SingularPartRemoval out;
  RealMatrix stacked(3 * n, n);
  stacked << sys.E(), sys.J(), sys.R();
  const RealMatrix kernel = nullspace_basis(stacked, rel_tol);
  if (kernel.cols() == 0) {
    out.system = sys;
    out.n_regular = n;
    out.transform = RealMatrix::Identity(n, n);
    return out;
  }
  const Svd st = svd(stacked);
  const Eigen::Index nr = n - kernel.cols();
  const RealMatrix regular = st.V.leftCols(nr);
  const RealMatrix k = st.V.rightCols(n - nr);
  const RealMatrix kb = k.transpose() * sys.B();
  const Svd sb = svd(kb);
  Eigen::Index rho = 0;
  if (kb.size() != 0) {
    const double tol = rel_tol < 0.0 ? default_rank_tol(n, sys.m()) : rel_tol;
    const double threshold = tol * std::max(sys.B().norm(), st.singular_values(0));
    for (Eigen::Index i = 0; i < sb.singular_values.size(); ++i) rho += sb.singular_values(i) > threshold ? 1 : 0;
  }
  RealMatrix t(n, n);
  t << regular, k * sb.U;
  out.transform = t;
  out.n_regular = nr;
  out.n_input_only = rho;
  out.dropped = n - nr - rho;
  out.system = congruence(sys, t.leftCols(nr + rho));
  return out;
}

// ---------------------------------------------------------------------------
// Condensed form

struct BlockSizes {
  Eigen::Index n_dyn = 0;        // E11 > 0
  Eigen::Index n_alg1_diss = 0;  // R22 > 0
  Eigen::Index n_alg1_cons = 0;  // J33 nonsingular
  Eigen::Index n_ind2 = 0;       // [J41 J42] full row rank
  Eigen::Index n_sing = 0;       // remaining (input-only) part

  Eigen::Index total() const { return n_dyn + n_alg1_diss + n_alg1_cons + n_ind2 + n_sing; }
};

struct StaircaseStep {
  std::string name;
  Eigen::Index accepted = 0;
  Eigen::Index rejected = 0;
  double smallest_accepted = 0.0;
  double largest_rejected = 0.0;
  double threshold = 0.0;
};

struct CondensedForm {
  RealMatrix transform;  // orthogonal, columns ordered as the blocks
  BlockSizes sizes;
  PHDAESystem system;    // congruence of the input with `transform`
  std::vector<StaircaseStep> audit;
  std::vector<std::string> warnings;
};

namespace detail {

/// Split the columns of `basis` by the magnitude of the symmetric eigenvalues of
/// basis^T M basis: (accepted, rejected) with accepted = |lambda| > threshold.
inline std::pair<RealMatrix, RealMatrix> split_by_eigenvalues(const RealMatrix& basis, const RealMatrix& m,
                                                              const std::string& name, double rel_tol,
                                                              CondensedForm& form) {
  StaircaseStep step;
  step.name = name;
  if (basis.cols() == 0) {
    form.audit.push_back(step);
    return {RealMatrix(basis.rows(), 0), RealMatrix(basis.rows(), 0)};
  }
  const SymEig eig = sym_eig(sym_part(basis.transpose() * m * basis), 1e-8);
  const double scale = std::max(eig.values.cwiseAbs().maxCoeff(), std::max(m.size() ? m.norm() : 0.0, 1e-300));
  step.threshold = (rel_tol < 0.0 ? default_rank_tol(m.rows(), m.cols()) : rel_tol) * scale;
  std::vector<Eigen::Index> acc, rej;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    (eig.values(i) > step.threshold ? acc : rej).push_back(i);
  }
  RealMatrix a(basis.rows(), static_cast<Eigen::Index>(acc.size())), r(basis.rows(), static_cast<Eigen::Index>(rej.size()));
  step.smallest_accepted = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < acc.size(); ++k) {
    a.col(static_cast<Eigen::Index>(k)) = basis * eig.vectors.col(acc[k]);
    step.smallest_accepted = std::min(step.smallest_accepted, eig.values(acc[k]));
  }
  for (std::size_t k = 0; k < rej.size(); ++k) {
    r.col(static_cast<Eigen::Index>(k)) = basis * eig.vectors.col(rej[k]);
    step.largest_rejected = std::max(step.largest_rejected, std::abs(eig.values(rej[k])));
  }
  step.accepted = a.cols();
  step.rejected = r.cols();
  form.audit.push_back(step);
  return {a, r};
}

/// Split `basis` into the part on which basis^T M basis (skew) is nonsingular
/// and its kernel, via an SVD; the nonsingular part is rotated to real Schur form.
inline std::pair<RealMatrix, RealMatrix> split_skew(const RealMatrix& basis, const RealMatrix& m, double rel_tol,
                                                    CondensedForm& form) {
  StaircaseStep step;
  step.name = "J33 (skew) nonsingular part";
  if (basis.cols() == 0) {
    form.audit.push_back(step);
    return {RealMatrix(basis.rows(), 0), RealMatrix(basis.rows(), 0)};
  }
  const RealMatrix jt = skew_part(basis.transpose() * m * basis);
  const Svd d = svd(jt);
  const double s1 = d.singular_values.size() ? d.singular_values(0) : 0.0;
  const double scale = std::max(s1, std::max(m.size() ? m.norm() : 0.0, 1e-300));
  step.threshold = (rel_tol < 0.0 ? default_rank_tol(m.rows(), m.cols()) : rel_tol) * scale;
  Eigen::Index rank = 0;
  while (rank < d.singular_values.size() && d.singular_values(rank) > step.threshold) ++rank;
  step.accepted = rank;
  step.rejected = basis.cols() - rank;
  step.smallest_accepted = rank > 0 ? d.singular_values(rank - 1) : std::numeric_limits<double>::infinity();
  step.largest_rejected = rank < d.singular_values.size() ? d.singular_values(rank) : 0.0;
  form.audit.push_back(step);
  // For a skew matrix range(jt) is invariant and orthogonal to its kernel.
  RealMatrix range = d.U.leftCols(rank);
  if (rank > 0) {
    const RealMatrix core = skew_part(range.transpose() * jt * range);
    Eigen::RealSchur<RealMatrix> schur(core);
    range = range * schur.matrixU();
  }
  return {basis * range, basis * d.U.rightCols(basis.cols() - rank)};
}

inline void flag_ambiguity(const StaircaseStep& step, CondensedForm& form) {
  const bool close_accept = step.accepted > 0 && step.smallest_accepted < 10.0 * step.threshold;
  const bool close_reject = step.rejected > 0 && step.largest_rejected > 0.1 * step.threshold;
  if (close_accept || close_reject) {
    form.warnings.push_back("ambiguous rank decision in step '" + step.name + "': accepted " +
                            std::to_string(step.accepted) + " (alternative " +
                            std::to_string(close_accept ? step.accepted - 1 : step.accepted + 1) +
                            "), smallest accepted " + num(step.smallest_accepted) + ", largest rejected " +
                            num(step.largest_rejected) + ", threshold " + num(step.threshold));
  }
}

}  // namespace detail

/// Orthogonal staircase x = T x_hat with blocks
///   x1: E11 > 0;   x2: R22 > 0 on ker E;   x3: J33 nonsingular on ker E cap ker R;
///   x4: index-2 part coupled to (x1, x2) through J;   x5: the rest.
/// Each rank decision is recorded in `audit`; ambiguous ones produce warnings.
inline CondensedForm condensed_form(const PHDAESystem& sys, double rel_tol = -1.0) {
  const Eigen::Index n = sys.n();
  CondensedForm form;
  const RealMatrix id = RealMatrix::Identity(n, n);
  auto [x1, ker_e] = detail::split_by_eigenvalues(id, sys.E(), "E11 positive definite", rel_tol, form);
  auto [x2, ker_er] = detail::split_by_eigenvalues(ker_e, sys.R(), "R22 positive definite", rel_tol, form);
  auto [x3, rest] = detail::split_skew(ker_er, sys.J(), rel_tol, form);

  StaircaseStep step;
  step.name = "[J41 J42] full row rank";
  RealMatrix x4(n, 0), x5(n, 0);
  if (rest.cols() > 0) {
    RealMatrix x12(n, x1.cols() + x2.cols());
    x12 << x1, x2;
    const RealMatrix coupling = rest.transpose() * sys.J() * x12;
    const Svd d = svd(coupling);
    const double s1 = d.singular_values.size() ? d.singular_values(0) : 0.0;
    step.threshold = (rel_tol < 0.0 ? default_rank_tol(n, n) : rel_tol) * std::max(s1, scale_of(sys.J()));
    Eigen::Index rank = 0;
    while (rank < d.singular_values.size() && d.singular_values(rank) > step.threshold) ++rank;
    step.accepted = rank;
    step.rejected = rest.cols() - rank;
    step.smallest_accepted = rank > 0 ? d.singular_values(rank - 1) : std::numeric_limits<double>::infinity();
    step.largest_rejected = rank < d.singular_values.size() ? d.singular_values(rank) : 0.0;
    x4 = rest * d.U.leftCols(rank);
    x5 = rest * d.U.rightCols(rest.cols() - rank);
  }
  form.audit.push_back(step);
  for (const auto& s : form.audit) detail::flag_ambiguity(s, form);

  form.sizes = {x1.cols(), x2.cols(), x3.cols(), x4.cols(), x5.cols()};
  form.transform.resize(n, n);
  form.transform << x1, x2, x3, x4, x5;
  form.system = congruence(sys, form.transform);

  // P rows beyond the first two blocks vanish when W >= 0.
  const Eigen::Index tail = form.sizes.n_alg1_cons + form.sizes.n_ind2 + form.sizes.n_sing;
  if (tail > 0) {
    const double p_tail = form.system.P().bottomRows(tail).norm();
    if (p_tail > 1e-8 * std::max(scale_of(sys.P()), 1.0)) {
      form.warnings.push_back("P rows of blocks 3-5 do not vanish (norm " + num(p_tail) +
                              "); input system is not passive to tolerance");
    }
  }
  return form;
}

/// Plain-text report of block sizes and the rank-gap audit.
inline std::string format_condensed_report(const CondensedForm& form) {
  std::ostringstream os;
  os << "n_dyn " << form.sizes.n_dyn << "\n"
     << "n_alg1_diss " << form.sizes.n_alg1_diss << "\n"
     << "n_alg1_cons " << form.sizes.n_alg1_cons << "\n"
     << "n_ind2 " << form.sizes.n_ind2 << "\n"
     << "n_sing " << form.sizes.n_sing << "\n";
  for (const auto& s : form.audit) {
    os << "step '" << s.name << "': accepted " << s.accepted << ", rejected " << s.rejected << ", smallest accepted "
       << s.smallest_accepted << ", largest rejected " << s.largest_rejected << ", threshold " << s.threshold << "\n";
  }
  for (const auto& w : form.warnings) os << "warning: " << w << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Output feedback

/// Closes the loop u = -K y + v with K = K^T > 0. With M = (K^{-1} + S + N)^{-1}:
///   A_cl = A - Bc M Cc,  Bc_cl = Bc M K^{-1},  Cc_cl = K^{-1} M Cc,  D_cl = D M K^{-1},
/// returned in pH form (J = skew A_cl, R = -sym A_cl, B/P from the port maps, S/N from D_cl).
inline PHDAESystem output_feedback_regularize(const PHDAESystem& sys, const RealMatrix& k) {
  const Eigen::Index m = sys.m();
  if (k.rows() != m || k.cols() != m) throw DimensionError("output_feedback_regularize: K must be m x m");
  if ((k - k.transpose()).norm() > 1e-12 * scale_of(k)) {
    throw NotPositiveDefiniteError("output_feedback_regularize: K is not symmetric");
  }
  Eigen::LLT<RealMatrix> llt(sym_part(k));
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("output_feedback_regularize: K is not positive definite");
  const RealMatrix k_inv = llt.solve(RealMatrix::Identity(m, m));
  RealMatrix mm;
  try {
    mm = solve_real(k_inv + sys.feedthrough(), RealMatrix::Identity(m, m));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError("output_feedback_regularize: K^{-1} + S + N is singular", e.rcond());
  }
  const GenericLTISystem g = as_generic(sys);
  const RealMatrix a_cl = g.A - g.B * mm * g.C;
  const RealMatrix b_cl = g.B * mm * k_inv;
  const RealMatrix c_cl = k_inv * mm * g.C;
  const RealMatrix d_cl = g.D * mm * k_inv;
  PHDAEMatrices out;
  out.E = sys.E();
  out.J = skew_part(a_cl);
  out.R = -sym_part(a_cl);
  out.B = 0.5 * (b_cl + c_cl.transpose());
  out.P = 0.5 * (c_cl.transpose() - b_cl);
  out.S = sym_part(d_cl);
  out.N = skew_part(d_cl);
  return PHDAESystem(std::move(out));
}

}  // namespace phmor
