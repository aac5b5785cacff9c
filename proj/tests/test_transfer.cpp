#include <gtest/gtest.h>

#include "phmor/phmor.hpp"

namespace phmor {
namespace {

TransferFunction scalar_tf(std::function<Complex(Complex)> f) {
  return [f](Complex s) {
    ComplexMatrix h(1, 1);
    h(0, 0) = f(s);
    return h;
  };
}

TEST(Eval, Index1FixtureClosedForm) {
  const PHDAESystem sys = fixture_index1().system;
  for (Complex s : {Complex(1, 0), Complex(0, 1), Complex(2.5, -3), Complex(0, 1e6)}) {
    const Complex expect = (s + 4.0) / (s + 1.0);
    EXPECT_LT(std::abs(eval(sys, s)(0, 0) - expect), 1e-13 * std::abs(expect)) << s;
  }
  EXPECT_DOUBLE_EQ(eval(sys, Complex(1, 0))(0, 0).real(), 2.5);
  EXPECT_NEAR(std::abs(eval(sys, Complex(0, 0))(0, 0) - 4.0), 0.0, 1e-14);
}

TEST(Eval, Index2FixtureClosedForm) {
  const PHDAESystem sys = fixture_index2().system;
  for (Complex s : {Complex(1, 0), Complex(0, 1), Complex(0.1, 7)}) {
    EXPECT_LT(std::abs(eval(sys, s)(0, 0) - 1.0 / (s + 1.0)), 1e-14) << s;
  }
  EXPECT_NEAR(std::abs(eval(sys, Complex(1, 0))(0, 0) - 0.5), 0.0, 1e-15);
  EXPECT_THROW(eval(sys, Complex(-1, 0)), SingularMatrixError);
}

TEST(Eval, TangentialMatchesFullEvaluation) {
  const Index1Benchmark b = random_ph_index1(6, 3, 2, 7);
  const GenericLTISystem g = as_generic(b.system);
  const Complex s(0.4, 1.3);
  ComplexVector dir(2);
  dir << Complex(1, 2), Complex(-0.5, 0);
  EXPECT_LT((eval_tangential(g, s, dir) - eval(g, s) * dir).norm(), 1e-12);
  EXPECT_LT((eval_tangential_left(g, s, dir) - (dir.transpose() * eval(g, s)).transpose()).norm(), 1e-12);
}

TEST(PolynomialPart, Index1FixtureIsOne) {
  const Index1Benchmark fx = fixture_index1();
  const PolynomialPart p = polynomial_part_index1(fx.partition());
  EXPECT_NEAR(p.P0(0, 0), 1.0, 1e-15);
  EXPECT_EQ(p.P1.norm(), 0.0);
}

TEST(PolynomialPart, Index1MatchesHighFrequencyLimit) {
  const Index1Benchmark b = random_ph_index1(8, 4, 2, 3);
  const PolynomialPart p = polynomial_part_index1(b.partition());
  const ComplexMatrix h = eval(b.system, Complex(0, 1e9));
  EXPECT_LT((h - p.P0.cast<Complex>()).norm(), 1e-6 * (1.0 + p.P0.norm()));
}

TEST(PolynomialPart, Index2FixtureIsZero) {
  const Index2Benchmark fx = fixture_index2();
  const PolynomialPart p = polynomial_part_index2(fx.partition());
  EXPECT_LT(p.P0.norm(), 1e-15);
  EXPECT_LT(p.P1.norm(), 1e-15);
}

TEST(PolynomialPart, Index2WithInputOnConstraintGrowsLinearly) {
  MassSpringSpec spec;
  spec.k = 4;
  const Index2Benchmark b = mass_spring_chain_b2(spec, 0.5);
  const PolynomialPart p = polynomial_part_index2(b.partition());
  ASSERT_GT(p.P1.norm(), 0.0);
  // Finite-difference route: H(i w) / (i w) -> D1 and H(i w) - i w D1 -> D0.
  const double w = 1e7;
  const ComplexMatrix h = eval(b.system, Complex(0, w));
  EXPECT_LT((h / Complex(0, w) - p.P1.cast<Complex>()).norm(), 1e-6 * (1.0 + p.P1.norm()));
  EXPECT_LT((h - Complex(0, w) * p.P1.cast<Complex>() - p.P0.cast<Complex>()).norm(), 1e-4 * (1.0 + p.P0.norm()));
}

TEST(FrequencyGrid, LogSpacing) {
  const FrequencyGrid g = FrequencyGrid::logspace(1e-2, 1e2, 5);
  ASSERT_EQ(g.omega.size(), 5u);
  EXPECT_DOUBLE_EQ(g.omega.front(), 1e-2);
  EXPECT_NEAR(g.omega[2], 1.0, 1e-15);
  EXPECT_NEAR(g.omega.back(), 1e2, 1e-12);
  EXPECT_THROW(FrequencyGrid::logspace(1.0, 0.5, 3), ArgumentError);
  FrequencyGrid bad;
  bad.omega = {1.0, 1.0};
  EXPECT_THROW(bad.check(), ArgumentError);
}

TEST(Norms, HinfOfFirstOrderLag) {
  // |1/(iw + 1)| peaks at w -> 0; the grid starts at 1e-4.
  const auto g = scalar_tf([](Complex s) { return 1.0 / (s + 1.0); });
  const auto zero = scalar_tf([](Complex) { return Complex(0.0); });
  const HinfError e = hinf_error(g, zero);
  EXPECT_NEAR(e.absolute, 1.0, 1e-8);
  EXPECT_NEAR(e.relative, 1.0, 1e-12);
  EXPECT_EQ(hinf_error(g, g).absolute, 0.0);
}

TEST(Norms, HinfRejectsMissingLinearTerm) {
  const auto g = scalar_tf([](Complex s) { return s + 1.0 / (s + 1.0); });
  const auto gr = scalar_tf([](Complex s) { return 1.0 / (s + 1.0); });
  EXPECT_THROW(hinf_error(g, gr), PolynomialMismatchError);
}

TEST(Norms, H2ClosedForms) {
  // ||1/(s+a)||_2^2 = 1/(2a);  <1/(s+a), 1/(s+b)> = 1/(a+b).
  const auto g1 = scalar_tf([](Complex s) { return 1.0 / (s + 1.0); });
  const auto g2 = scalar_tf([](Complex s) { return 1.0 / (s + 2.0); });
  EXPECT_NEAR(h2_norm(g1), std::sqrt(0.5), 1e-8);
  EXPECT_NEAR(h2_norm(g2), std::sqrt(0.25), 1e-8);
  EXPECT_NEAR(h2_error(g1, g2), std::sqrt(0.5 + 0.25 - 2.0 / 3.0), 1e-8);
}

TEST(Norms, H2MismatchedConstantIsInfinite) {
  const auto g1 = scalar_tf([](Complex s) { return 1.0 + 1.0 / (s + 1.0); });
  const auto g2 = scalar_tf([](Complex s) { return 1.0 / (s + 1.0); });
  EXPECT_THROW(h2_error(g1, g2), PolynomialMismatchError);
  EXPECT_NEAR(h2_error(g1, scalar_tf([](Complex s) { return 1.0 + 1.0 / (s + 2.0); })),
              std::sqrt(0.5 + 0.25 - 2.0 / 3.0), 1e-8);
}

TEST(Norms, H2OfChainWithUnobservableModeAtOrigin) {
  const Index2Benchmark b = mass_spring_chain(MassSpringSpec{});
  const double h2 = h2_norm(transfer_of(b.system));
  EXPECT_TRUE(std::isfinite(h2));
  EXPECT_GT(h2, 0.0);
}

TEST(FrequencyResponse, CsvLayout) {
  const auto g = scalar_tf([](Complex s) { return 1.0 / (s + 1.0); });
  std::ostringstream os;
  write_frequency_response_csv(os, frequency_response(g, FrequencyGrid::logspace(1.0, 10.0, 2)));
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "omega,re_H11,im_H11");
  EXPECT_EQ(row.rfind("1,0.5,-0.5", 0), 0u) << row;
}

}  // namespace
}  // namespace phmor
