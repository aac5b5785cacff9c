#include <gtest/gtest.h>

#include <random>

#include "phmor/phmor.hpp"

namespace phmor {
namespace {

RealMatrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Eigen::HouseholderQR<RealMatrix> qr(g);
  return qr.householderQ() * RealMatrix::Identity(n, n);
}

/// Appends `pad` states with zero E, J, R rows; the first `reached` of them get a B entry.
PHDAESystem padded(const PHDAESystem& sys, Eigen::Index pad, Eigen::Index reached) {
  const Eigen::Index n = sys.n(), m = sys.m(), N = n + pad;
  PHDAEMatrices x;
  x.E = RealMatrix::Zero(N, N);
  x.J = RealMatrix::Zero(N, N);
  x.R = RealMatrix::Zero(N, N);
  x.B = RealMatrix::Zero(N, m);
  x.P = RealMatrix::Zero(N, m);
  x.E.topLeftCorner(n, n) = sys.E();
  x.J.topLeftCorner(n, n) = sys.J();
  x.R.topLeftCorner(n, n) = sys.R();
  x.B.topRows(n) = sys.B();
  x.P.topRows(n) = sys.P();
  for (Eigen::Index i = 0; i < reached; ++i) x.B(n + i, i % m) = 1.0;
  x.S = sys.S();
  x.N = sys.N();
  return PHDAESystem(std::move(x));
}

TEST(Diagnose, Index1Fixture) {
  const DiagnosisReport d = diagnose(fixture_index1().system);
  EXPECT_TRUE(d.pencil_regular);
  EXPECT_TRUE(d.index_leq1);
  EXPECT_TRUE(d.c1.passed);
  EXPECT_TRUE(d.o1.passed);
  EXPECT_TRUE(d.c2.passed);
  EXPECT_TRUE(d.o2.passed);
}

TEST(Diagnose, Index2FixtureIsNotImpulseControllable) {
  const DiagnosisReport d = diagnose(fixture_index2().system);
  EXPECT_TRUE(d.pencil_regular);
  EXPECT_FALSE(d.index_leq1);
  // [E, A S_inf, B] has rank 2 < 3: S_inf = e3, A e3 = e2 and B = e1 lie in range E.
  EXPECT_FALSE(d.c2.passed);
  EXPECT_FALSE(d.o2.passed);
}

TEST(Diagnose, RotatedIndex2StaysIndex2) {
  const DiagnosisReport d = diagnose(congruence(fixture_index2().system, random_orthogonal(3, 17)));
  EXPECT_TRUE(d.pencil_regular);
  EXPECT_FALSE(d.index_leq1);
}

TEST(Diagnose, SingularPencilIsReported) {
  const DiagnosisReport d = diagnose(padded(fixture_index1().system, 2, 0));
  EXPECT_FALSE(d.pencil_regular);
  EXPECT_FALSE(d.notes.empty());
}

TEST(SingularPart, RemovesUnreachedKernelAndKeepsTransfer) {
  const PHDAESystem base = fixture_index1().system;
  for (Eigen::Index pad : {1, 2, 5}) {
    const PHDAESystem mixed = congruence(padded(base, pad, 0), random_orthogonal(2 + pad, 40 + pad));
    const SingularPartRemoval rem = remove_singular_part(mixed);
    EXPECT_EQ(rem.dropped, pad);
    EXPECT_EQ(rem.n_regular, 2);
    EXPECT_EQ(rem.n_input_only, 0);
    EXPECT_NEAR((rem.transform.transpose() * rem.transform - RealMatrix::Identity(2 + pad, 2 + pad)).norm(), 0.0,
                1e-13);
    EXPECT_TRUE(validate_structure(rem.system).all_passed());
    for (Complex s : {Complex(1, 0), Complex(0.2, 3)}) {
      const Complex expect = (s + 4.0) / (s + 1.0);
      EXPECT_LT(std::abs(eval(rem.system, s)(0, 0) - expect), 1e-12) << "pad " << pad << " s " << s;
    }
  }
}

TEST(SingularPart, KeepsInputOnlyStates) {
  const Index1Benchmark b = random_ph_index1(4, 2, 2, 9);
  const PHDAESystem sys = padded(b.system, 4, 2);
  const SingularPartRemoval rem = remove_singular_part(sys);
  EXPECT_EQ(rem.n_regular, 6);
  EXPECT_EQ(rem.n_input_only, 2);
  EXPECT_EQ(rem.dropped, 2);
  EXPECT_EQ(rem.system.n(), 8);
}

TEST(SingularPart, NoKernelIsIdentity) {
  const PHDAESystem sys = fixture_index2().system;
  const SingularPartRemoval rem = remove_singular_part(sys);
  EXPECT_EQ(rem.dropped, 0);
  EXPECT_EQ((rem.system.J() - sys.J()).norm(), 0.0);
}

TEST(Condensed, Index2FixtureBlockSizes) {
  const CondensedForm form = condensed_form(fixture_index2().system);
  EXPECT_EQ(form.sizes.n_dyn, 2);
  EXPECT_EQ(form.sizes.n_alg1_diss, 0);
  EXPECT_EQ(form.sizes.n_alg1_cons, 0);
  EXPECT_EQ(form.sizes.n_ind2, 1);
  EXPECT_EQ(form.sizes.n_sing, 0);
  EXPECT_TRUE(form.warnings.empty());
}

TEST(Condensed, AllFiveBlocks) {
  // x1 dynamic, x2 dissipative algebraic, (x3, x4) conservative pair, x5 constraint on x1, x6 input-only.
  PHDAEMatrices m;
  m.E = RealMatrix::Zero(6, 6);
  m.E(0, 0) = 2.0;
  m.R = RealMatrix::Zero(6, 6);
  m.R(1, 1) = 1.0;
  m.J = RealMatrix::Zero(6, 6);
  m.J(2, 3) = 3.0;
  m.J(3, 2) = -3.0;
  m.J(0, 4) = 1.0;
  m.J(4, 0) = -1.0;
  m.B = RealMatrix::Zero(6, 1);
  m.B(0, 0) = 1.0;
  m.B(5, 0) = 1.0;
  const PHDAESystem sys(m);
  const PHDAESystem mixed = congruence(sys, random_orthogonal(6, 3));
  const CondensedForm form = condensed_form(mixed);
  EXPECT_EQ(form.sizes.n_dyn, 1);
  EXPECT_EQ(form.sizes.n_alg1_diss, 1);
  EXPECT_EQ(form.sizes.n_alg1_cons, 2);
  EXPECT_EQ(form.sizes.n_ind2, 1);
  EXPECT_EQ(form.sizes.n_sing, 1);
  EXPECT_EQ(form.sizes.total(), 6);
  EXPECT_NEAR((form.transform.transpose() * form.transform - RealMatrix::Identity(6, 6)).norm(), 0.0, 1e-12);
  const RealMatrix& e = form.system.E();
  EXPECT_GT(e(0, 0), 1.0);
  EXPECT_LT(e.bottomRightCorner(5, 5).norm(), 1e-12);
  EXPECT_LT(e.topRightCorner(1, 5).norm(), 1e-12);
  EXPECT_GT(form.system.R()(1, 1), 0.5);
  // The conservative pair carries a nonsingular skew block.
  EXPECT_NEAR(std::abs(form.system.J()(2, 3)), 3.0, 1e-12);
  const std::string report = format_condensed_report(form);
  EXPECT_NE(report.find("n_ind2 1"), std::string::npos);
}

TEST(Feedback, MatchesClosedLoopTransferAndStaysPassive) {
  const Index1Benchmark b = random_ph_index1(6, 3, 2, 21);
  RealMatrix k(2, 2);
  k << 2.0, 0.5, 0.5, 1.0;
  const PHDAESystem cl = output_feedback_regularize(b.system, k);
  EXPECT_TRUE(validate_structure(cl).all_passed());
  EXPECT_GE(passivity_min_eig(cl), -1e-10);
  EXPECT_EQ((cl.E() - b.system.E()).norm(), 0.0);
  // u = -K y + v  =>  y = (I + H K)^{-1} H v.
  for (Complex s : {Complex(0.5, 0), Complex(0.1, 2.0), Complex(3, -7)}) {
    const ComplexMatrix h = eval(b.system, s);
    const ComplexMatrix expect =
        (ComplexMatrix::Identity(2, 2) + h * k.cast<Complex>()).partialPivLu().solve(h);
    EXPECT_LT((eval(cl, s) - expect).norm(), 1e-11 * (1.0 + expect.norm())) << s;
  }
}

TEST(Feedback, RejectsIndefiniteGain) {
  const PHDAESystem sys = fixture_index1().system;
  EXPECT_THROW(output_feedback_regularize(sys, -RealMatrix::Identity(1, 1)), NotPositiveDefiniteError);
  EXPECT_THROW(output_feedback_regularize(sys, RealMatrix::Identity(2, 2)), DimensionError);
  RealMatrix asym(2, 2);
  asym << 1, 1, 0, 1;
  EXPECT_THROW(output_feedback_regularize(random_ph_index1(3, 1, 2, 1).system, asym), NotPositiveDefiniteError);
}

}  // namespace
}  // namespace phmor
