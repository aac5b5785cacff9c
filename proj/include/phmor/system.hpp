#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phmor/linalg.hpp"

namespace phmor {

/// Mutable bag of the seven structured matrices, used while assembling a system.
/// Empty matrices are promoted to zeros of the right shape by PHDAESystem.
struct PHDAEMatrices {
  RealMatrix E, J, R, B, P, S, N;
};

/// Linear port-Hamiltonian descriptor system
///
///   E x' = (J - R) x + (B - P) u,
///   y    = (B + P)^T x + (S + N) u.
///
/// Immutable after construction. Construction checks shapes and finiteness only;
/// the structural conditions are reported by validate_structure().
class PHDAESystem {
 public:
  PHDAESystem() = default;

  explicit PHDAESystem(PHDAEMatrices mats) {
    const Eigen::Index n = infer_state_dim(mats);
    const Eigen::Index m = infer_port_dim(mats);
    promote(mats.E, n, n);
    promote(mats.J, n, n);
    promote(mats.R, n, n);
    promote(mats.B, n, m);
    promote(mats.P, n, m);
    promote(mats.S, m, m);
    promote(mats.N, m, m);
    check_shape(mats.E, n, n, "E");
    check_shape(mats.J, n, n, "J");
    check_shape(mats.R, n, n, "R");
    check_shape(mats.B, n, m, "B");
    check_shape(mats.P, n, m, "P");
    check_shape(mats.S, m, m, "S");
    check_shape(mats.N, m, m, "N");
    for (auto [mat, name] : {std::pair{&mats.E, "E"}, {&mats.J, "J"}, {&mats.R, "R"}, {&mats.B, "B"},
                             {&mats.P, "P"}, {&mats.S, "S"}, {&mats.N, "N"}}) {
      require_finite(*mat, name);
    }
    m_ = std::move(mats);
  }

  PHDAESystem(RealMatrix e, RealMatrix j, RealMatrix r, RealMatrix b, RealMatrix p, RealMatrix s,
              RealMatrix n)
      : PHDAESystem(PHDAEMatrices{std::move(e), std::move(j), std::move(r), std::move(b),
                                  std::move(p), std::move(s), std::move(n)}) {}

  Eigen::Index n() const { return m_.E.rows(); }
  Eigen::Index m() const { return m_.B.cols(); }

  const RealMatrix& E() const { return m_.E; }
  const RealMatrix& J() const { return m_.J; }
  const RealMatrix& R() const { return m_.R; }
  const RealMatrix& B() const { return m_.B; }
  const RealMatrix& P() const { return m_.P; }
  const RealMatrix& S() const { return m_.S; }
  const RealMatrix& N() const { return m_.N; }
  const PHDAEMatrices& matrices() const { return m_; }

  RealMatrix A() const { return m_.J - m_.R; }
  RealMatrix input_map() const { return m_.B - m_.P; }
  RealMatrix output_map() const { return (m_.B + m_.P).transpose(); }
  RealMatrix feedthrough() const { return m_.S + m_.N; }

  /// Passivity matrix W = [[R, P], [P^T, S]].
  RealMatrix passivity_matrix() const {
    const Eigen::Index n = this->n(), m = this->m();
    RealMatrix w(n + m, n + m);
    w << m_.R, m_.P, m_.P.transpose(), m_.S;
    return w;
  }

 private:
  static Eigen::Index infer_state_dim(const PHDAEMatrices& mats) {
    for (const RealMatrix* mat : {&mats.E, &mats.J, &mats.R}) {
      if (mat->size() > 0) return mat->rows();
    }
    for (const RealMatrix* mat : {&mats.B, &mats.P}) {
      if (mat->size() > 0) return mat->rows();
    }
    return mats.E.rows();
  }
  static Eigen::Index infer_port_dim(const PHDAEMatrices& mats) {
    for (const RealMatrix* mat : {&mats.B, &mats.P}) {
      if (mat->size() > 0) return mat->cols();
    }
    for (const RealMatrix* mat : {&mats.S, &mats.N}) {
      if (mat->size() > 0) return mat->rows();
    }
    return mats.B.cols();
  }
  static void promote(RealMatrix& mat, Eigen::Index rows, Eigen::Index cols) {
    if (mat.size() == 0) mat = RealMatrix::Zero(rows, cols);
  }
  static void check_shape(const RealMatrix& mat, Eigen::Index rows, Eigen::Index cols,
                          const char* name) {
    if (mat.rows() != rows || mat.cols() != cols) {
      throw DimensionError(std::string(name) + " has shape " + std::to_string(mat.rows()) + "x" +
                           std::to_string(mat.cols()) + ", expected " + std::to_string(rows) +
                           "x" + std::to_string(cols));
    }
  }

  PHDAEMatrices m_;
};

/// Unstructured descriptor system E x' = A x + B u, y = C x + D u.
struct GenericLTISystem {
  RealMatrix E, A, B, C, D;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }

  void check() const {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || E.rows() != n || E.cols() != n) {
      throw DimensionError("GenericLTISystem: E and A must be square of equal size");
    }
    if (B.rows() != n || C.cols() != n) throw DimensionError("GenericLTISystem: B/C size mismatch");
    if (D.rows() != C.rows() || D.cols() != B.cols()) {
      throw DimensionError("GenericLTISystem: D must be outputs x inputs");
    }
  }
};

/// A = J - R, B_io = B - P, C_io = (B + P)^T, D = S + N.
inline GenericLTISystem as_generic(const PHDAESystem& sys) {
  return {sys.E(), sys.A(), sys.input_map(), sys.output_map(), sys.feedthrough()};
}

struct SymSkewSplit {
  RealMatrix sym;
  RealMatrix skew;
};

inline SymSkewSplit symmetric_skew_split(const RealMatrix& m) {
  require_square(m, "symmetric_skew_split input");
  return {sym_part(m), skew_part(m)};
}

/// x^T E x / 2.
inline double hamiltonian(const PHDAESystem& sys, const RealVector& x) {
  if (x.size() != sys.n()) {
    throw DimensionError("hamiltonian: state has length " + std::to_string(x.size()) +
                         ", system has n = " + std::to_string(sys.n()));
  }
  return 0.5 * x.dot(sys.E() * x);
}

// ---------------------------------------------------------------------------
// Structural validation

struct ValidationEntry {
  std::string condition;
  bool passed = false;
  double violation = 0.0;  // normalized violation measure, 0 when exact
  double measured = 0.0;   // raw evidence, e.g. smallest eigenvalue
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;

  bool all_passed() const {
    for (const auto& e : entries) {
      if (!e.passed) return false;
    }
    return true;
  }
  const ValidationEntry& at(const std::string& condition) const {
    for (const auto& e : entries) {
      if (e.condition == condition) return e;
    }
    throw Error("no validation entry named " + condition);
  }
};

namespace detail {

inline double spectral_radius_sym(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double relative_asymmetry(const RealMatrix& m, int sign) {
  const RealMatrix d = m - sign * m.transpose();
  const double base = m.size() == 0 ? 0.0 : m.norm();
  const double num = d.size() == 0 ? 0.0 : d.norm();
  if (num == 0.0) return 0.0;
  return base > 0.0 ? num / base : num;
}

inline ValidationEntry psd_entry(const std::string& name, const RealMatrix& m, double tol) {
  ValidationEntry e;
  e.condition = name;
  const double asym = relative_asymmetry(m, +1);
  const double lmin = min_sym_eigenvalue(m);
  const double scale = spectral_radius_sym(m);
  e.measured = m.size() == 0 ? 0.0 : lmin;
  const bool symmetric = asym <= tol;
  const bool psd = m.size() == 0 || lmin >= -tol * scale;
  e.passed = symmetric && psd;
  e.violation = std::max(asym, (m.size() == 0 || lmin >= 0.0) ? 0.0 : -lmin / std::max(scale, 1e-300));
  e.detail = "relative asymmetry " + num(asym) + ", min eigenvalue " + num(e.measured);
  return e;
}

}  // namespace detail

/// Checks the four defining conditions: E = E^T >= 0; J = -J^T; W = W^T >= 0;
/// S = S^T and N = -N^T. Each entry carries its measured violation.
inline ValidationReport validate_structure(const PHDAESystem& sys, double tol = 1e-10) {
  ValidationReport report;
  report.entries.push_back(detail::psd_entry("E symmetric positive semidefinite", sys.E(), tol));

  ValidationEntry skew;
  skew.condition = "J skew-symmetric";
  skew.violation = detail::relative_asymmetry(sys.J(), -1);
  skew.measured = skew.violation;
  skew.passed = skew.violation <= tol;
  skew.detail = "||J + J^T||_F / ||J||_F = " + num(skew.violation);
  report.entries.push_back(skew);

  report.entries.push_back(
      detail::psd_entry("W symmetric positive semidefinite", sys.passivity_matrix(), tol));

  ValidationEntry feed;
  feed.condition = "S symmetric, N skew-symmetric";
  const double s_asym = detail::relative_asymmetry(sys.S(), +1);
  const double n_asym = detail::relative_asymmetry(sys.N(), -1);
  feed.violation = std::max(s_asym, n_asym);
  feed.measured = feed.violation;
  feed.passed = feed.violation <= tol;
  feed.detail = "S asymmetry " + num(s_asym) + ", N symmetry " + num(n_asym);
  report.entries.push_back(feed);
  return report;
}

/// Orthogonal congruence x = V x~: (V^T E V, V^T J V, V^T R V, V^T B, V^T P, S, N).
/// `v` may be rectangular (n x k) for one-sided projections.
inline PHDAESystem congruence(const PHDAESystem& sys, const RealMatrix& v) {
  if (v.rows() != sys.n()) throw DimensionError("congruence: basis row count must equal n");
  PHDAEMatrices out;
  out.E = sym_part(v.transpose() * sys.E() * v);
  out.J = skew_part(v.transpose() * sys.J() * v);
  out.R = sym_part(v.transpose() * sys.R() * v);
  out.B = v.transpose() * sys.B();
  out.P = v.transpose() * sys.P();
  out.S = sys.S();
  out.N = sys.N();
  return PHDAESystem(std::move(out));
}

}  // namespace phmor
