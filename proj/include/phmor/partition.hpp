#pragma once

// Block-partitioned views of a PHDAESystem for the three semi-explicit forms:
//
//   index-1:  E = [E11 0; 0 0],  J22 - R22 nonsingular
//   index-2:  E = [E11 0; 0 0],  J = [J11 J12; -J12^T 0],  R = [R11 0; 0 0]
//   mixed:    E = [E11 E12 0; E21 E22 0; 0 0 0],  J31 square nonsingular,
//             J22 - R22 nonsingular, B3 = P3 = 0
//
// Views hold a non-owning pointer to the parent; the parent must outlive them.

#include <string>

#include "phmor/system.hpp"

namespace phmor {

using ConstBlock = Eigen::Block<const RealMatrix>;

/// Threshold on the 2-norm condition number used for every nonsingularity test.
inline constexpr double kSingularityThreshold = 1e12;

struct PartitionTolerances {
  double zero_block = 1e-12;  // relative to the norm of the parent matrix
  double condition = kSingularityThreshold;
};

namespace detail {

inline void require_zero_block(const RealMatrix& block, double parent_norm, double tol,
                               const std::string& name) {
  if (block.size() == 0) return;
  const double mx = block.cwiseAbs().maxCoeff();
  if (mx > tol * std::max(parent_norm, 1.0)) {
    throw StructureError(name + " must vanish",
                         "largest entry " + std::to_string(mx) + " exceeds tolerance");
  }
}

inline void require_positive_definite(const RealMatrix& block, double cond_limit,
                                      const std::string& name) {
  if (block.size() == 0) return;
  if (detail::relative_asymmetry(block, +1) > 1e-10) {
    throw StructureError(name + " positive definite", "block is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym_part(block), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(block.rows() - 1);
  if (!(lmin > 0.0) || lmax / lmin > cond_limit) {
    throw StructureError(name + " positive definite",
                         "eigenvalue range [" + num(lmin) + ", " + num(lmax) + "]");
  }
}

inline void require_nonsingular(const RealMatrix& block, double cond_limit, const std::string& name) {
  if (block.size() == 0) return;
  if (block.rows() != block.cols()) {
    throw StructureError(name + " nonsingular", "block is not square (" + std::to_string(block.rows()) +
                                                    "x" + std::to_string(block.cols()) + ")");
  }
  const double c = condition_number(block);
  if (!(c < cond_limit)) {
    throw StructureError(name + " nonsingular", "condition estimate " + num(c));
  }
}

inline double norm_or_one(const RealMatrix& m) { return m.size() == 0 ? 1.0 : std::max(m.norm(), 1e-300); }

}  // namespace detail

class Index1Partition {
 public:
  Index1Partition(const PHDAESystem& sys, Eigen::Index n1, PartitionTolerances tol = {})
      : sys_(&sys), n1_(n1), n2_(sys.n() - n1) {
    if (n1 < 0 || n1 > sys.n()) throw DimensionError("partition_index1: n1 out of range");
    const double en = detail::norm_or_one(sys.E());
    detail::require_positive_definite(E11(), tol.condition, "E11");
    detail::require_zero_block(sys.E().topRightCorner(n1_, n2_), en, tol.zero_block, "E12");
    detail::require_zero_block(sys.E().bottomLeftCorner(n2_, n1_), en, tol.zero_block, "E21");
    detail::require_zero_block(sys.E().bottomRightCorner(n2_, n2_), en, tol.zero_block, "E22");
    detail::require_nonsingular(A22(), tol.condition, "J22 - R22");
  }

  const PHDAESystem& system() const { return *sys_; }
  Eigen::Index n1() const { return n1_; }
  Eigen::Index n2() const { return n2_; }

  ConstBlock E11() const { return sys_->E().topLeftCorner(n1_, n1_); }
  ConstBlock J11() const { return sys_->J().topLeftCorner(n1_, n1_); }
  ConstBlock J12() const { return sys_->J().topRightCorner(n1_, n2_); }
  ConstBlock J22() const { return sys_->J().bottomRightCorner(n2_, n2_); }
  ConstBlock R11() const { return sys_->R().topLeftCorner(n1_, n1_); }
  ConstBlock R12() const { return sys_->R().topRightCorner(n1_, n2_); }
  ConstBlock R22() const { return sys_->R().bottomRightCorner(n2_, n2_); }
  ConstBlock B1() const { return sys_->B().topRows(n1_); }
  ConstBlock B2() const { return sys_->B().bottomRows(n2_); }
  ConstBlock P1() const { return sys_->P().topRows(n1_); }
  ConstBlock P2() const { return sys_->P().bottomRows(n2_); }

  RealMatrix A22() const { return J22() - R22(); }

 private:
  const PHDAESystem* sys_;
  Eigen::Index n1_, n2_;
};

class Index2Partition {
 public:
  Index2Partition(const PHDAESystem& sys, Eigen::Index n1, PartitionTolerances tol = {})
      : sys_(&sys), n1_(n1), n2_(sys.n() - n1) {
    if (n1 < 0 || n1 > sys.n()) throw DimensionError("partition_index2: n1 out of range");
    const double en = detail::norm_or_one(sys.E());
    const double jn = detail::norm_or_one(sys.J());
    const double rn = detail::norm_or_one(sys.R());
    detail::require_positive_definite(E11(), tol.condition, "E11");
    detail::require_zero_block(sys.E().topRightCorner(n1_, n2_), en, tol.zero_block, "E12");
    detail::require_zero_block(sys.E().bottomRightCorner(n2_, n2_), en, tol.zero_block, "E22");
    detail::require_zero_block(sys.J().bottomRightCorner(n2_, n2_), jn, tol.zero_block, "J22");
    detail::require_zero_block(sys.R().bottomRightCorner(n2_, n2_), rn, tol.zero_block, "R22");
    detail::require_zero_block(sys.R().topRightCorner(n1_, n2_), rn, tol.zero_block, "R12");
    if (n2_ > 0) {
      const RealMatrix x = E11().llt().solve(RealMatrix(J12()));
      coupling_ = J12().transpose() * x;
      try {
        detail::require_nonsingular(coupling_, tol.condition, "J12^T E11^{-1} J12");
      } catch (const StructureError& e) {
        throw StructureError("J12^T E11^{-1} J12 nonsingular",
                             std::string("constraint coupling is singular: ") + e.what());
      }
    } else {
      coupling_ = RealMatrix(0, 0);
    }
    const double bn = detail::norm_or_one(sys.B());
    const double pn = detail::norm_or_one(sys.P());
    b2_zero_ = (n2_ == 0) ||
               (B2().cwiseAbs().maxCoeff() <= tol.zero_block * bn &&
                P2().cwiseAbs().maxCoeff() <= tol.zero_block * pn);
  }

  const PHDAESystem& system() const { return *sys_; }
  Eigen::Index n1() const { return n1_; }
  Eigen::Index n2() const { return n2_; }
  /// True when the input does not enter the constraint rows (B2 = P2 = 0).
  bool b2_zero() const { return b2_zero_; }

  ConstBlock E11() const { return sys_->E().topLeftCorner(n1_, n1_); }
  ConstBlock J11() const { return sys_->J().topLeftCorner(n1_, n1_); }
  ConstBlock R11() const { return sys_->R().topLeftCorner(n1_, n1_); }
  ConstBlock J12() const { return sys_->J().topRightCorner(n1_, n2_); }
  ConstBlock B1() const { return sys_->B().topRows(n1_); }
  ConstBlock B2() const { return sys_->B().bottomRows(n2_); }
  ConstBlock P1() const { return sys_->P().topRows(n1_); }
  ConstBlock P2() const { return sys_->P().bottomRows(n2_); }

  RealMatrix A11() const { return J11() - R11(); }
  /// J12^T E11^{-1} J12.
  const RealMatrix& coupling() const { return coupling_; }

 private:
  const PHDAESystem* sys_;
  Eigen::Index n1_, n2_;
  RealMatrix coupling_;
  bool b2_zero_ = true;
};

class MixedPartition {
 public:
  MixedPartition(const PHDAESystem& sys, Eigen::Index n1, Eigen::Index n2, PartitionTolerances tol = {})
      : sys_(&sys), n1_(n1), n2_(n2), n3_(sys.n() - n1 - n2) {
    if (n1 < 0 || n2 < 0 || n3_ < 0) throw DimensionError("partition_mixed: block sizes out of range");
    const Eigen::Index nd = n1_ + n2_;
    const double en = detail::norm_or_one(sys.E());
    const double jn = detail::norm_or_one(sys.J());
    const double rn = detail::norm_or_one(sys.R());
    detail::require_positive_definite(sys.E().topLeftCorner(nd, nd), tol.condition, "leading E block");
    detail::require_zero_block(sys.E().rightCols(n3_), en, tol.zero_block, "E(:,3)");
    detail::require_zero_block(sys.E().bottomRows(n3_), en, tol.zero_block, "E(3,:)");
    detail::require_zero_block(sys.J().block(n1_, nd, n2_, n3_), jn, tol.zero_block, "J23");
    detail::require_zero_block(sys.J().block(nd, n1_, n3_, n2_), jn, tol.zero_block, "J32");
    detail::require_zero_block(sys.J().bottomRightCorner(n3_, n3_), jn, tol.zero_block, "J33");
    detail::require_zero_block(sys.R().bottomRows(n3_), rn, tol.zero_block, "R(3,:)");
    detail::require_zero_block(sys.R().rightCols(n3_), rn, tol.zero_block, "R(:,3)");
    detail::require_nonsingular(A22(), tol.condition, "J22 - R22");
    if (n3_ != n1_) {
      throw StructureError("J31 nonsingular", "J31 must be square, got " + std::to_string(n3_) + "x" +
                                                   std::to_string(n1_));
    }
    detail::require_nonsingular(RealMatrix(J31()), tol.condition, "J31");
    detail::require_zero_block(sys.B().bottomRows(n3_), detail::norm_or_one(sys.B()), tol.zero_block, "B3");
    detail::require_zero_block(sys.P().bottomRows(n3_), detail::norm_or_one(sys.P()), tol.zero_block, "P3");
  }

  const PHDAESystem& system() const { return *sys_; }
  Eigen::Index n1() const { return n1_; }
  Eigen::Index n2() const { return n2_; }
  Eigen::Index n3() const { return n3_; }

  ConstBlock E11() const { return sys_->E().topLeftCorner(n1_, n1_); }
  ConstBlock E22() const { return sys_->E().block(n1_, n1_, n2_, n2_); }
  ConstBlock J22() const { return sys_->J().block(n1_, n1_, n2_, n2_); }
  ConstBlock R22() const { return sys_->R().block(n1_, n1_, n2_, n2_); }
  ConstBlock J31() const { return sys_->J().block(n1_ + n2_, 0, n3_, n1_); }
  ConstBlock B2() const { return sys_->B().middleRows(n1_, n2_); }
  ConstBlock P2() const { return sys_->P().middleRows(n1_, n2_); }

  RealMatrix A22() const { return J22() - R22(); }

 private:
  const PHDAESystem* sys_;
  Eigen::Index n1_, n2_, n3_;
};

inline Index1Partition partition_index1(const PHDAESystem& sys, Eigen::Index n1, PartitionTolerances tol = {}) {
  return Index1Partition(sys, n1, tol);
}
inline Index2Partition partition_index2(const PHDAESystem& sys, Eigen::Index n1, PartitionTolerances tol = {}) {
  return Index2Partition(sys, n1, tol);
}
inline MixedPartition partition_mixed(const PHDAESystem& sys, Eigen::Index n1, Eigen::Index n2,
                                      PartitionTolerances tol = {}) {
  return MixedPartition(sys, n1, n2, tol);
}

}  // namespace phmor
