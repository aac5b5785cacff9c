#include <gtest/gtest.h>

#include <random>

#include "phmor/phmor.hpp"

namespace phmor {
namespace {

InterpolationData mixed_points(Eigen::Index m) {
  InterpolationData d;
  ComplexVector b(m), c(m), e(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    b(k) = Complex(1.0 + k, -0.5 * k);
    c(k) = Complex(0.3 * k - 1.0, 0.0);
    e(k) = Complex(0.5, 0.2 + k);
  }
  d.points = {Complex(0.5, 2.0), Complex(0.5, -2.0), Complex(3.0, 0.0), Complex(0.05, 0.7), Complex(0.05, -0.7)};
  d.directions = {b, b.conjugate(), c, e, e.conjugate()};
  return d;
}

void expect_structure(const ReducedModel& red) {
  EXPECT_TRUE(red.ph_valid);
  EXPECT_GE(red.min_eig_W, -1e-10);
  EXPECT_EQ((red.system.E() - red.system.E().transpose()).norm(), 0.0);
  EXPECT_LE((red.system.J() + red.system.J().transpose()).norm(), 1e-12 * (1.0 + red.system.J().norm()));
  EXPECT_GE(min_sym_eigenvalue(red.system.E()), -1e-10);
}

TEST(Basis, RawColumnsSolveTheShiftedSystems) {
  const Index1Benchmark b = random_ph_index1(7, 3, 2, 11);
  const GenericLTISystem g = as_generic(b.system);
  const InterpolationData d = mixed_points(2);
  const ProjectionBasis basis = build_V_generic(g, d, {BasisNormalization::raw});
  ASSERT_EQ(basis.complex_columns.cols(), 5);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Complex s = d.points[i];
    const ComplexMatrix pencil = s * g.E.cast<Complex>() - g.A.cast<Complex>();
    const ComplexVector res = pencil * basis.complex_columns.col(static_cast<Eigen::Index>(i)) -
                              g.B.cast<Complex>() * d.directions[i];
    EXPECT_LT(res.norm(), 1e-10);
  }
  // Conjugate pairs become (Re v, Im v): real span of dimension 5.
  EXPECT_EQ(basis.V.cols(), 5);
  EXPECT_TRUE(basis.V.allFinite());
}

TEST(Basis, Index1FixtureColumn) {
  const ProjectionBasis basis =
      build_V_generic(fixture_index1().system, InterpolationData::with_ones({1.0}, 1), {BasisNormalization::raw});
  ASSERT_EQ(basis.complex_columns.cols(), 1);
  EXPECT_NEAR(std::abs(basis.complex_columns(0, 0) - 1.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(basis.complex_columns(1, 0) + 0.5), 0.0, 1e-14);
}

TEST(Basis, ConjugatePairMustBeClosed) {
  const Index1Benchmark b = random_ph_index1(5, 2, 1, 4);
  InterpolationData d = InterpolationData::with_ones({Complex(1.0, 2.0)}, 1);
  EXPECT_THROW(build_V_generic(b.system, d), ArgumentError);
  EXPECT_THROW(build_V_generic(b.system, InterpolationData{}), ArgumentError);
}

TEST(Index1, FixtureShiftedMatchesAtTheInterpolationPoint) {
  const Index1Benchmark fx = fixture_index1();
  const Index1Partition part = fx.partition();
  const InterpolationData d = InterpolationData::with_ones({1.0}, 1);
  const ReducedModel red = reduce(part, ReductionMethod::index1_shifted, d);
  EXPECT_NEAR(std::abs(red.evaluate(1.0)(0, 0) - 2.5), 0.0, 1e-14);
  EXPECT_EQ(red.order(), 1);
  // Constant term matches the full model: Hr(inf) = 1.
  EXPECT_NEAR(std::abs(red.evaluate(Complex(0, 1e9))(0, 0) - 1.0), 0.0, 1e-8);
}

TEST(Index1, BothMethodsInterpolateRandomSystems) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Index1Benchmark b = random_ph_index1(12, 5, 2, seed);
    const Index1Partition part = b.partition();
    const InterpolationData d = mixed_points(2);
    const ReducedModel blk = reduce(part, ReductionMethod::index1_blockdiag, d);
    const ReducedModel sh = reduce(part, ReductionMethod::index1_shifted, d);
    EXPECT_LT(interpolation_residual(b.system, blk, d), 1e-10);
    EXPECT_LT(interpolation_residual(b.system, sh, d), 1e-10);
    expect_structure(blk);
    EXPECT_EQ(blk.order(), 5 + 5);
    EXPECT_EQ(sh.order(), 5);
    EXPECT_EQ(blk.blocks, (std::vector<Eigen::Index>{5, 5}));
    const PolynomialPart p = polynomial_part_index1(part);
    const Complex big(0, 1e9);
    EXPECT_LT((blk.evaluate(big) - p.P0.cast<Complex>()).norm(), 1e-6 * (1.0 + p.P0.norm()));
  }
}

TEST(Index2, FixtureIsReproducedExactly) {
  const Index2Benchmark fx = fixture_index2();
  const Index2Partition part = fx.partition();
  const ReducedModel red = reduce(part, ReductionMethod::index2_zero_b2, InterpolationData::with_ones({1.0}, 1));
  EXPECT_EQ(red.order(), 1);
  expect_structure(red);
  for (Complex s : {Complex(0, 1), Complex(2, 0), Complex(0.1, -5)}) {
    EXPECT_LT(std::abs(red.evaluate(s)(0, 0) - 1.0 / (s + 1.0)), 1e-14) << s;
  }
}

TEST(Index2, SaddleBasisAgreesWithProjectedOde) {
  MassSpringSpec spec;
  spec.k = 6;
  const Index2Benchmark b = mass_spring_chain(spec);
  const Index2Partition part = b.partition();
  const ProjectorOracle oracle = projector_oracle_index2(part);
  const GenericLTISystem ode = oracle.restricted();
  const InterpolationData d = mixed_points(1);
  const ReducedModel red = reduce(part, ReductionMethod::index2_zero_b2, d);
  expect_structure(red);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const ComplexMatrix h_ode = eval(ode, d.points[i]);
    const ComplexMatrix h_red = red.evaluate(d.points[i]);
    EXPECT_LT((h_ode - h_red).norm(), 1e-9 * (1.0 + h_ode.norm()));
  }
  // The basis stays inside the constraint kernel.
  EXPECT_LT((part.J12().transpose() * red.basis).norm(), 1e-10);
}

TEST(Index2, InputOnConstraintAugmentsWithRateTerm) {
  MassSpringSpec spec;
  spec.k = 5;
  const Index2Benchmark b = mass_spring_chain_b2(spec, 0.5);
  const Index2Partition part = b.partition();
  const InterpolationData d = mixed_points(1);
  const ReducedModel red = reduce(part, ReductionMethod::index2_nonzero_b2, d);
  EXPECT_TRUE(red.augmented_input);
  EXPECT_LT(interpolation_residual(b.system, red, d), 1e-9);
  const PolynomialPart p = polynomial_part_index2(part);
  EXPECT_LT((red.feedthrough_rate - p.P1).norm(), 1e-12);
  const Complex big(0, 1e6);
  EXPECT_LT((red.evaluate(big) - eval(b.system, big)).norm(), 1e-5 * (1.0 + eval(b.system, big).norm()));
  EXPECT_EQ(red.augmented().B.cols(), 2);
  // The zero-B2 reducer on the same system misses the linear term.
  EXPECT_THROW(reduce(part, ReductionMethod::index2_zero_b2, d), StructureError);
}

TEST(Mixed, InterpolatesAndKeepsStructure) {
  MassSpringSpec spec;
  spec.k = 6;
  const MixedBenchmark b = mass_spring_mixed(spec);
  const MixedPartition part = b.partition();
  const InterpolationData d = mixed_points(1);
  const ReducedModel red = reduce(part, ReductionMethod::mixed, d);
  expect_structure(red);
  EXPECT_LT(interpolation_residual(b.system, red, d), 1e-9);
  EXPECT_EQ(red.blocks, (std::vector<Eigen::Index>{1, 5, 1}));
}

TEST(Dispatch, RejectsMismatchedPartition) {
  const Index1Benchmark fx = fixture_index1();
  const AnyPartition part = fx.partition();
  EXPECT_THROW(reduce(part, ReductionMethod::index2_zero_b2, InterpolationData::with_ones({1.0}, 1)), StructureError);
  EXPECT_THROW(parse_reduction_method("index3"), ArgumentError);
  for (auto m : {ReductionMethod::index1_shifted, ReductionMethod::index1_blockdiag, ReductionMethod::index2_zero_b2,
                 ReductionMethod::index2_nonzero_b2, ReductionMethod::mixed}) {
    EXPECT_EQ(parse_reduction_method(to_string(m)), m);
  }
}

TEST(Partition, RejectsSystemsOfTheWrongForm) {
  const PHDAESystem sys = fixture_index2().system;
  EXPECT_THROW(Index1Partition(sys, 2), StructureError);
  EXPECT_THROW(Index2Partition(fixture_index1().system, 1), StructureError);
}

TEST(ReducedModel, PhFromGenericRoundTrip) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  RealMatrix e(3, 3), a(3, 3), b(3, 2), c(2, 3), d(2, 2);
  for (RealMatrix* m : {&e, &a, &b, &c, &d}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = normal(rng);
  }
  e = e * e.transpose();
  const GenericLTISystem g = as_generic(ph_from_generic(e, a, b, c, d));
  EXPECT_LT((g.A - a).norm(), 1e-14);
  EXPECT_LT((g.B - b).norm(), 1e-14);
  EXPECT_LT((g.C - c).norm(), 1e-14);
  EXPECT_LT((g.D - d).norm(), 1e-14);
}

}  // namespace
}  // namespace phmor
