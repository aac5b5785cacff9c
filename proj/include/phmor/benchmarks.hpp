#pragma once

// Benchmark generators: constrained mass-spring-damper chain, MAC-grid Oseen
// discretization, and random index-1 pH systems.

#include <random>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "phmor/partition.hpp"

namespace phmor {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Sparse counterpart of PHDAESystem for assemblies too large for dense storage.
struct SparsePHDAE {
  SparseMatrix E, J, R, B, P, S, N;
  Eigen::Index n1 = 0;  // size of the leading (dynamic) block

  Eigen::Index n() const { return E.rows(); }
  Eigen::Index m() const { return B.cols(); }

  PHDAESystem to_dense() const {
    return PHDAESystem(RealMatrix(E), RealMatrix(J), RealMatrix(R), RealMatrix(B), RealMatrix(P), RealMatrix(S),
                       RealMatrix(N));
  }
};

namespace detail {

inline SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

inline double sparse_norm(const SparseMatrix& m) { return m.nonZeros() == 0 ? 0.0 : m.norm(); }

/// Certifies M + delta I > 0 through the pivots of a sparse LDL^T factorization.
/// Returns the smallest pivot; the factorization failing counts as -inf.
inline double ldlt_min_pivot(const SparseMatrix& m, double delta) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  SparseMatrix id(m.rows(), m.cols());
  id.setIdentity();
  const SparseMatrix shifted = SparseMatrix(0.5 * (m + SparseMatrix(m.transpose()))) + delta * id;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return ldlt.vectorD().minCoeff();
}

inline ValidationEntry sparse_psd_entry(const std::string& name, const SparseMatrix& m, double tol) {
  ValidationEntry e;
  e.condition = name;
  const double nm = sparse_norm(m);
  const double asym = nm > 0.0 ? sparse_norm(SparseMatrix(m - SparseMatrix(m.transpose()))) / nm : 0.0;
  const double delta = tol * std::max(nm, 1.0);
  const double pivot = ldlt_min_pivot(m, delta);
  e.measured = pivot;
  e.violation = asym;
  e.passed = asym <= tol && pivot > 0.0;
  e.detail = "relative asymmetry " + num(asym) + ", smallest LDL^T pivot of M + " + num(delta) +
             " I is " + num(pivot);
  return e;
}

}  // namespace detail

/// Structural checks on sparse data. Semidefiniteness is certified by an LDL^T
/// factorization of M + tol*max(||M||_F, 1)*I having positive pivots.
inline ValidationReport validate_structure_sparse(const SparsePHDAE& sys, double tol = 1e-8) {
  ValidationReport report;
  report.entries.push_back(detail::sparse_psd_entry("E symmetric positive semidefinite", sys.E, tol));

  ValidationEntry skew;
  skew.condition = "J skew-symmetric";
  const double jn = detail::sparse_norm(sys.J);
  skew.violation = jn > 0.0 ? detail::sparse_norm(SparseMatrix(sys.J + SparseMatrix(sys.J.transpose()))) / jn : 0.0;
  skew.measured = skew.violation;
  skew.passed = skew.violation <= tol;
  report.entries.push_back(skew);

  const Eigen::Index n = sys.n(), m = sys.m();
  std::vector<Triplet> t;
  auto put = [&](const SparseMatrix& blk, Eigen::Index r0, Eigen::Index c0) {
    for (int k = 0; k < blk.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(blk, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    }
  };
  put(sys.R, 0, 0);
  put(sys.P, 0, n);
  put(SparseMatrix(sys.P.transpose()), n, 0);
  put(sys.S, n, n);
  report.entries.push_back(
      detail::sparse_psd_entry("W symmetric positive semidefinite", detail::from_triplets(n + m, n + m, t), tol));

  ValidationEntry feed;
  feed.condition = "S symmetric, N skew-symmetric";
  const double sn = detail::sparse_norm(sys.S), nn = detail::sparse_norm(sys.N);
  const double s_asym = sn > 0.0 ? detail::sparse_norm(SparseMatrix(sys.S - SparseMatrix(sys.S.transpose()))) / sn : 0.0;
  const double n_asym = nn > 0.0 ? detail::sparse_norm(SparseMatrix(sys.N + SparseMatrix(sys.N.transpose()))) / nn : 0.0;
  feed.violation = std::max(s_asym, n_asym);
  feed.measured = feed.violation;
  feed.passed = feed.violation <= tol;
  report.entries.push_back(feed);
  return report;
}

// ---------------------------------------------------------------------------
// Constrained mass-spring-damper chain

struct MassSpringSpec {
  int k = 10;                 // number of masses
  double mass = 4.0;          // every mass
  double spring = 4.0;        // neighbour springs
  double damper = 1.0;        // neighbour dampers
  double ground_spring = 4.0;
  double ground_damper = 1.0;
  int input_node = 0;         // force input on this mass; output is its velocity

  void check() const {
    if (k < 2) throw ArgumentError("mass-spring chain needs k >= 2");
    if (!(mass > 0.0 && spring > 0.0 && damper > 0.0 && ground_spring > 0.0 && ground_damper > 0.0)) {
      throw ArgumentError("mass-spring constants must be positive");
    }
    if (input_node < 0 || input_node >= k) throw ArgumentError("mass-spring input node out of range");
  }
};

/// State (v, q, lambda): E = diag(M, K, 0), J11 = [0 -K; K 0], R11 = diag(C, 0),
/// J12 = [G^T; 0] with G = e_1^T - e_k^T (rigid bar between the end masses).
/// `amplitude` != 0 lets the input act on the constraint row (B2 = amplitude).
inline SparsePHDAE mass_spring_chain_sparse(const MassSpringSpec& spec, double amplitude = 0.0) {
  spec.check();
  const Eigen::Index k = spec.k, n1 = 2 * k, n = n1 + 1;
  std::vector<Triplet> te, tj, tr;
  auto stiffness = [&](Eigen::Index i, Eigen::Index j, double neighbour, double ground) -> double {
    if (i == j) {
      const double deg = (i == 0 || i == k - 1) ? 1.0 : 2.0;
      return neighbour * deg + ground;
    }
    return -neighbour;
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    te.emplace_back(i, i, spec.mass);
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - 1); j <= std::min<Eigen::Index>(k - 1, i + 1); ++j) {
      const double kij = stiffness(i, j, spec.spring, spec.ground_spring);
      const double cij = stiffness(i, j, spec.damper, spec.ground_damper);
      te.emplace_back(k + i, k + j, kij);
      tj.emplace_back(i, k + j, -kij);
      tj.emplace_back(k + i, j, kij);
      tr.emplace_back(i, j, cij);
    }
  }
  // rigid bar: G v = v_1 - v_k = 0
  tj.emplace_back(0, n1, 1.0);
  tj.emplace_back(k - 1, n1, -1.0);
  tj.emplace_back(n1, 0, -1.0);
  tj.emplace_back(n1, k - 1, 1.0);
  std::vector<Triplet> tb{{spec.input_node, 0, 1.0}};
  if (amplitude != 0.0) tb.emplace_back(n1, 0, amplitude);

  SparsePHDAE out;
  out.E = detail::from_triplets(n, n, te);
  out.J = detail::from_triplets(n, n, tj);
  out.R = detail::from_triplets(n, n, tr);
  out.B = detail::from_triplets(n, 1, tb);
  out.P = SparseMatrix(n, 1);
  out.S = SparseMatrix(1, 1);
  out.N = SparseMatrix(1, 1);
  out.n1 = n1;
  return out;
}

struct Index2Benchmark {
  PHDAESystem system;
  Eigen::Index n1 = 0;

  Index2Partition partition() const { return Index2Partition(system, n1); }
};

inline Index2Benchmark mass_spring_chain(const MassSpringSpec& spec) {
  const SparsePHDAE s = mass_spring_chain_sparse(spec);
  return {s.to_dense(), s.n1};
}

/// Same chain with the input also entering the constraint row (B2 = amplitude).
inline Index2Benchmark mass_spring_chain_b2(const MassSpringSpec& spec, double amplitude) {
  const SparsePHDAE s = mass_spring_chain_sparse(spec, amplitude);
  return {s.to_dense(), s.n1};
}

struct MixedBenchmark {
  PHDAESystem system;
  Eigen::Index n1 = 0, n2 = 0;

  MixedPartition partition() const { return MixedPartition(system, n1, n2); }
};

/// The chain in coordinates where the rigid-bar constraint acts on a single
/// state: a Householder reflection Q maps G^T/||G|| to e_1, so the constrained
/// velocity combination becomes x1 (size 1), the remaining 2k-1 coordinates
/// form x2, and the multiplier is x3. In these coordinates J22 - R22 has a
/// k x (k-1) off-diagonal block over a zero q block and is singular, so a spring
/// relaxation term R_qq = relaxation * I (relaxation > 0) is added to the chain.
inline MixedBenchmark mass_spring_mixed(const MassSpringSpec& spec, double relaxation = 0.1) {
  if (!(relaxation > 0.0)) throw ArgumentError("mass_spring_mixed: relaxation must be positive");
  PHDAEMatrices base = mass_spring_chain(spec).system.matrices();
  base.R.block(spec.k, spec.k, spec.k, spec.k) += relaxation * RealMatrix::Identity(spec.k, spec.k);
  const PHDAESystem chain(std::move(base));
  const Eigen::Index n1 = 2 * spec.k, n = n1 + 1;
  RealVector g = RealVector::Zero(n1);
  g(0) = 1.0;
  g(spec.k - 1) = -1.0;
  g /= g.norm();
  RealVector w = g;
  w(0) -= 1.0;
  RealMatrix q = RealMatrix::Identity(n, n);
  q.topLeftCorner(n1, n1) -= 2.0 * w * w.transpose() / w.squaredNorm();
  const PHDAESystem rotated = congruence(chain, q);
  // Clean round-off in the blocks the mixed form requires to vanish.
  PHDAEMatrices mats = rotated.matrices();
  mats.E.row(n - 1).setZero();
  mats.E.col(n - 1).setZero();
  mats.J.block(1, n1, n1 - 1, 1).setZero();
  mats.J.block(n1, 1, 1, n1 - 1).setZero();
  mats.B(n - 1, 0) = 0.0;
  return {PHDAESystem(std::move(mats)), 1, n1 - 1};
}

// ---------------------------------------------------------------------------
// Oseen equations on a MAC staggered grid

struct OseenSpec {
  int n_grid = 8;            // cells per side
  double viscosity = 0.1;
  double wind_x = 1.0;
  double wind_y = 0.0;
  double forcing_split = 0.5;  // vertical velocity forced where x < forcing_split

  void check() const {
    if (n_grid < 3) throw ArgumentError("Oseen grid needs n_grid >= 3");
    if (!(viscosity > 0.0)) throw ArgumentError("Oseen viscosity must be positive");
  }
};

/// Unknowns: u on interior vertical faces, v on interior horizontal faces
/// (n1 = 2 n_g (n_g - 1)), pressure in cells with cell 0 removed (n2 = n_g^2 - 1).
/// E = diag(I, 0), R11 = mu (-Laplacian), J11 = -(a . grad) by centered
/// differences, J12 = -(discrete gradient), B1 = indicator of the v faces with
/// x < forcing_split, P = 0, D = 0.
inline SparsePHDAE oseen_grid_sparse(const OseenSpec& spec) {
  spec.check();
  const Eigen::Index ng = spec.n_grid;
  const double h = 1.0 / static_cast<double>(ng);
  const Eigen::Index nu = (ng - 1) * ng;  // u(i, j): i = 1..ng-1 face column, j = 0..ng-1 cell row
  const Eigen::Index n1 = 2 * nu, n2 = ng * ng - 1, n = n1 + n2;
  auto u_index = [&](Eigen::Index i, Eigen::Index j) { return (i - 1) + (ng - 1) * j; };
  auto v_index = [&](Eigen::Index i, Eigen::Index j) { return nu + i + ng * (j - 1); };
  auto p_index = [&](Eigen::Index i, Eigen::Index j) { return n1 + i + ng * j - 1; };  // cell (0,0) removed

  std::vector<Triplet> te, tj, tr, tb;
  for (Eigen::Index i = 0; i < n1; ++i) te.emplace_back(i, i, 1.0);
  const double mu = spec.viscosity / (h * h);
  const double cx = spec.wind_x / (2.0 * h), cy = spec.wind_y / (2.0 * h);

  // Momentum stencils for one velocity component. `normal` is the face-normal
  // direction index range [1, ng-1]; `tangential` runs over [0, ng-1].
  // Walls: normal neighbours outside are zero (Dirichlet on the face);
  // tangential neighbours outside use the ghost value -inside.
  auto assemble_component = [&](auto index, bool is_u) {
    for (Eigen::Index a = 1; a <= ng - 1; ++a) {      // normal position
      for (Eigen::Index b = 0; b <= ng - 1; ++b) {    // tangential position
        const Eigen::Index row = is_u ? index(a, b) : index(b, a);
        auto at = [&](Eigen::Index aa, Eigen::Index bb) { return is_u ? index(aa, bb) : index(bb, aa); };
        double diag = 0.0;
        // normal direction
        diag += 2.0;
        if (a - 1 >= 1) tr.emplace_back(row, at(a - 1, b), -mu);
        if (a + 1 <= ng - 1) tr.emplace_back(row, at(a + 1, b), -mu);
        // tangential direction
        for (Eigen::Index bb : {b - 1, b + 1}) {
          if (bb >= 0 && bb <= ng - 1) {
            diag += 1.0;
            tr.emplace_back(row, at(a, bb), -mu);
          } else {
            diag += 2.0;  // ghost = -inside
          }
        }
        tr.emplace_back(row, row, mu * diag);
        // convection -(a . grad), centered, neighbours outside truncated
        const double c_normal = is_u ? cx : cy;
        const double c_tangential = is_u ? cy : cx;
        if (a + 1 <= ng - 1) tj.emplace_back(row, at(a + 1, b), -c_normal);
        if (a - 1 >= 1) tj.emplace_back(row, at(a - 1, b), c_normal);
        if (b + 1 <= ng - 1) tj.emplace_back(row, at(a, b + 1), -c_tangential);
        if (b - 1 >= 0) tj.emplace_back(row, at(a, b - 1), c_tangential);
      }
    }
  };
  assemble_component(u_index, true);
  assemble_component(v_index, false);

  // Pressure gradient: (grad p)_u(i,j) = (p(i,j) - p(i-1,j)) / h; J12 = -grad.
  auto add_coupling = [&](Eigen::Index vel, Eigen::Index ci, Eigen::Index cj, double sign) {
    if (ci == 0 && cj == 0) return;  // pinned cell
    const Eigen::Index p = p_index(ci, cj);
    const double g = sign / h;
    tj.emplace_back(vel, p, -g);
    tj.emplace_back(p, vel, g);
  };
  for (Eigen::Index i = 1; i <= ng - 1; ++i) {
    for (Eigen::Index j = 0; j <= ng - 1; ++j) {
      add_coupling(u_index(i, j), i, j, 1.0);
      add_coupling(u_index(i, j), i - 1, j, -1.0);
      add_coupling(v_index(j, i), j, i, 1.0);
      add_coupling(v_index(j, i), j, i - 1, -1.0);
    }
  }
  // Vertical body force on the left part of the domain.
  for (Eigen::Index i = 0; i <= ng - 1; ++i) {
    if ((static_cast<double>(i) + 0.5) * h < spec.forcing_split) {
      for (Eigen::Index j = 1; j <= ng - 1; ++j) tb.emplace_back(v_index(i, j), 0, 1.0);
    }
  }

  SparsePHDAE out;
  out.E = detail::from_triplets(n, n, te);
  out.J = detail::from_triplets(n, n, tj);
  out.R = detail::from_triplets(n, n, tr);
  out.B = detail::from_triplets(n, 1, tb);
  out.P = SparseMatrix(n, 1);
  out.S = SparseMatrix(1, 1);
  out.N = SparseMatrix(1, 1);
  out.n1 = n1;
  return out;
}

inline Index2Benchmark oseen_grid(const OseenSpec& spec) {
  const SparsePHDAE s = oseen_grid_sparse(spec);
  return {s.to_dense(), s.n1};
}

// ---------------------------------------------------------------------------
// Random index-1 systems

struct Index1Benchmark {
  PHDAESystem system;
  Eigen::Index n1 = 0;

  Index1Partition partition() const { return Index1Partition(system, n1); }
};

/// E = diag(F F^T + delta I, 0), J random skew, W = L L^T (rank about 3/4 of n + m)
/// with delta I added to R22, so E11 > 0, W >= 0 and J22 - R22 is nonsingular.
inline Index1Benchmark random_ph_index1(Eigen::Index n1, Eigen::Index n2, Eigen::Index m, std::uint64_t seed) {
  if (n1 < 1 || n2 < 0 || m < 1) throw ArgumentError("random_ph_index1: need n1 >= 1, n2 >= 0, m >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto randn = [&](Eigen::Index r, Eigen::Index c) {
    RealMatrix x(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) x(i, j) = normal(rng);
    }
    return x;
  };
  const Eigen::Index n = n1 + n2;
  const double delta = 0.1;
  PHDAEMatrices mats;
  const RealMatrix f = randn(n1, n1) / std::sqrt(static_cast<double>(n1));
  mats.E = RealMatrix::Zero(n, n);
  mats.E.topLeftCorner(n1, n1) = f * f.transpose() + delta * RealMatrix::Identity(n1, n1);
  const RealMatrix gj = randn(n, n) / std::sqrt(static_cast<double>(n));
  mats.J = gj - gj.transpose();
  const Eigen::Index q = std::max<Eigen::Index>(1, (3 * (n + m) + 3) / 4);
  const RealMatrix l = randn(n + m, q) / std::sqrt(static_cast<double>(q));
  RealMatrix w = l * l.transpose();
  w.block(n1, n1, n2, n2) += delta * RealMatrix::Identity(n2, n2);
  mats.R = w.topLeftCorner(n, n);
  mats.P = w.topRightCorner(n, m);
  mats.S = w.bottomRightCorner(m, m);
  mats.B = randn(n, m);
  const RealMatrix gn = randn(m, m);
  mats.N = 0.5 * (gn - gn.transpose());
  return {PHDAESystem(std::move(mats)), n1};
}

}  // namespace phmor
