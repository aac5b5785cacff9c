#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "phmor/phmor.hpp"

namespace phmor {
namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phmor_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(PHDAESystem, PromotesEmptyBlocksToZero) {
  RealMatrix e = RealMatrix::Identity(3, 3), b = RealMatrix::Ones(3, 2);
  const PHDAESystem sys(e, RealMatrix(), RealMatrix(), b, RealMatrix(), RealMatrix(), RealMatrix());
  EXPECT_EQ(sys.n(), 3);
  EXPECT_EQ(sys.m(), 2);
  EXPECT_EQ(sys.J().rows(), 3);
  EXPECT_EQ(sys.S().rows(), 2);
  EXPECT_EQ(sys.passivity_matrix().rows(), 5);
  EXPECT_EQ(sys.P().norm(), 0.0);
}

TEST(PHDAESystem, RejectsBadShapesAndNonFinite) {
  const RealMatrix e = RealMatrix::Identity(3, 3);
  EXPECT_THROW(PHDAESystem(e, RealMatrix::Zero(2, 2), RealMatrix(), RealMatrix::Ones(3, 1), RealMatrix(), RealMatrix(),
                           RealMatrix()),
               DimensionError);
  RealMatrix bad = e;
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(PHDAESystem(bad, RealMatrix(), RealMatrix(), RealMatrix::Ones(3, 1), RealMatrix(), RealMatrix(),
                           RealMatrix()),
               Error);
}

TEST(PHDAESystem, GenericFormAndHamiltonian) {
  const PHDAESystem sys = fixture_index1().system;
  const GenericLTISystem g = as_generic(sys);
  RealMatrix a(2, 2);
  a << 0, 1, -1, -1;
  EXPECT_EQ((g.A - a).norm(), 0.0);
  EXPECT_EQ((g.B - g.C.transpose()).norm(), 0.0);
  RealVector x(2);
  x << 3, 7;
  EXPECT_DOUBLE_EQ(hamiltonian(sys, x), 4.5);
  EXPECT_THROW(hamiltonian(sys, RealVector::Ones(3)), DimensionError);
}

TEST(Validation, AcceptsFixturesAndFlagsViolations) {
  EXPECT_TRUE(validate_structure(fixture_index1().system).all_passed());
  EXPECT_TRUE(validate_structure(fixture_index2().system).all_passed());

  PHDAEMatrices m = fixture_index2().system.matrices();
  m.J(0, 1) = 2.0;
  const ValidationReport skew = validate_structure(PHDAESystem(m));
  EXPECT_FALSE(skew.at("J skew-symmetric").passed);
  EXPECT_TRUE(skew.at("E symmetric positive semidefinite").passed);

  m = fixture_index2().system.matrices();
  m.R(0, 0) = -1.0;
  const ValidationReport w = validate_structure(PHDAESystem(m));
  EXPECT_FALSE(w.at("W symmetric positive semidefinite").passed);
  EXPECT_NEAR(w.at("W symmetric positive semidefinite").measured, -1.0, 1e-14);

  m = fixture_index2().system.matrices();
  m.N = RealMatrix::Ones(1, 1);
  EXPECT_FALSE(validate_structure(PHDAESystem(m)).at("S symmetric, N skew-symmetric").passed);
  EXPECT_THROW(skew.at("no such condition"), Error);
}

TEST(Validation, CouplingThroughPMustStayPassive) {
  // W = [[1, p], [p, 1]] is PSD iff |p| <= 1.
  for (double p : {0.5, 1.5}) {
    PHDAEMatrices m;
    m.E = RealMatrix::Identity(1, 1);
    m.R = RealMatrix::Identity(1, 1);
    m.B = RealMatrix::Ones(1, 1);
    m.P = p * RealMatrix::Ones(1, 1);
    m.S = RealMatrix::Identity(1, 1);
    EXPECT_EQ(validate_structure(PHDAESystem(m)).all_passed(), p <= 1.0) << "p = " << p;
  }
}

TEST(Validation, SparseAgreesWithDense) {
  const SparsePHDAE s = mass_spring_chain_sparse(MassSpringSpec{});
  EXPECT_TRUE(validate_structure_sparse(s).all_passed());
  EXPECT_TRUE(validate_structure(s.to_dense()).all_passed());
  SparsePHDAE broken = s;
  broken.R.coeffRef(0, 0) = -5.0;
  EXPECT_FALSE(validate_structure_sparse(broken).all_passed());
}

TEST(Congruence, TransformsEveryBlock) {
  const PHDAESystem sys = fixture_index2().system;
  RealMatrix v(3, 2);
  v << 1, 0, 0, 1, 1, 1;
  const PHDAESystem t = congruence(sys, v);
  EXPECT_EQ((t.E() - v.transpose() * sys.E() * v).norm(), 0.0);
  EXPECT_EQ((t.J() - v.transpose() * sys.J() * v).norm(), 0.0);
  EXPECT_EQ((t.R() - v.transpose() * sys.R() * v).norm(), 0.0);
  EXPECT_EQ((t.B() - v.transpose() * sys.B()).norm(), 0.0);
}

TEST(MatrixMarket, CoordinateGeneral) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "% comment\n"
      "\n"
      "2 3 2\n"
      "1 1 1.5\n"
      "2 3 -2\n");
  const RealMatrix m = RealMatrix(read_matrix_market(in));
  RealMatrix expect(2, 3);
  expect << 1.5, 0, 0, 0, 0, -2;
  EXPECT_EQ((m - expect).norm(), 0.0);
}

TEST(MatrixMarket, SymmetryExpansion) {
  std::istringstream sym("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 1\n");
  RealMatrix expect(2, 2);
  expect << 4, 1, 1, 0;
  EXPECT_EQ((RealMatrix(read_matrix_market(sym)) - expect).norm(), 0.0);

  std::istringstream skew("%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n");
  expect << 0, -3, 3, 0;
  EXPECT_EQ((RealMatrix(read_matrix_market(skew)) - expect).norm(), 0.0);
}

TEST(MatrixMarket, ArrayIsColumnMajor) {
  std::istringstream in("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  RealMatrix expect(2, 2);
  expect << 1, 3, 2, 4;
  EXPECT_EQ((RealMatrix(read_matrix_market(in)) - expect).norm(), 0.0);
}

long parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_matrix_market(in, "input.mtx");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "input.mtx");
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return -1;
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("%%MatrixMarket tensor coordinate real general\n"), 1);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1\n"), 1);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\nx y\n"), 2);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n3 1 1\n"), 4);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), 3);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real symmetric\n2 3 0\n"), 2);
  EXPECT_EQ(parse_error_line(""), 1);
}

TEST(MatrixMarket, WriteReadRoundTrip) {
  RealMatrix m = RealMatrix::Random(4, 3);
  m(2, 1) = 0.0;
  m(0, 0) = 1.0 / 3.0;
  std::stringstream io;
  write_matrix_market(io, m);
  const RealMatrix back = RealMatrix(read_matrix_market(io));
  EXPECT_EQ((back - m).norm(), 0.0);
}

TEST(Manifest, RoundTripAndTypedAccess) {
  Manifest mf;
  mf.set("n", 12LL);
  mf.set("tol", 1e-7);
  mf.set("flag", true);
  mf.set("name", std::string("chain"));
  mf.set("n", 13LL);
  std::stringstream io;
  mf.write(io);
  const Manifest back = Manifest::read(io, "m.txt");
  EXPECT_EQ(back.entries().size(), 4u);
  EXPECT_EQ(back.get_int("n"), 13);
  EXPECT_DOUBLE_EQ(back.get_double("tol"), 1e-7);
  EXPECT_TRUE(back.get_bool("flag"));
  EXPECT_EQ(back.get("name"), "chain");
  EXPECT_EQ(back.get_int("absent", 5), 5);
  EXPECT_THROW(back.get_int("name"), ParseError);
}

TEST(Manifest, CommentsAndMalformedLines) {
  std::istringstream ok("# header\n a = 1  # trailing\n\nb=two\n");
  const Manifest mf = Manifest::read(ok, "m.txt");
  EXPECT_EQ(mf.get_int("a"), 1);
  EXPECT_EQ(mf.get("b"), "two");
  std::istringstream bad("a = 1\nnot a pair\n");
  try {
    Manifest::read(bad, "m.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Container, RoundTripOmitsZeroMatrices) {
  const fs::path dir = scratch_dir("container");
  const PHDAESystem sys = fixture_index2().system;
  Manifest mf;
  mf.set("n1", 2LL);
  mf.set("index_class", std::string("index2"));
  write_container(dir, sys, mf);
  EXPECT_TRUE(fs::exists(dir / "E.mtx"));
  EXPECT_FALSE(fs::exists(dir / "P.mtx"));
  const Container c = read_container(dir);
  EXPECT_EQ(c.index_class(), "index2");
  EXPECT_EQ(c.system.n1, 2);
  EXPECT_EQ(c.missing, (std::vector<std::string>{"P", "S", "N"}));
  const PHDAESystem back = c.system.to_dense();
  EXPECT_EQ((back.E() - sys.E()).norm() + (back.J() - sys.J()).norm() + (back.B() - sys.B()).norm(), 0.0);
  EXPECT_EQ(back.N().rows(), 1);
  fs::remove_all(dir);
}

TEST(Container, ShapeMismatchAndMissingDirectory) {
  const fs::path dir = scratch_dir("container_bad");
  write_container(dir, fixture_index2().system, Manifest());
  {
    std::ofstream os(dir / "B.mtx");
    write_matrix_market(os, RealMatrix::Ones(2, 1));
  }
  EXPECT_THROW(read_container(dir), ParseError);
  fs::remove_all(dir);
  EXPECT_THROW(read_container(dir), ParseError);
}

TEST(ReducedModelIO, RoundTrip) {
  const Index2Benchmark fx = fixture_index2();
  const Index2Partition part = fx.partition();
  const ReducedModel red = reduce(part, ReductionMethod::index2_zero_b2, InterpolationData::with_ones({1.0}, 1));
  const fs::path dir = scratch_dir("reduced");
  write_reduced_model(dir, red);
  const ReducedModel back = read_reduced_model(dir);
  EXPECT_EQ(back.method, red.method);
  EXPECT_EQ(back.ph_valid, red.ph_valid);
  EXPECT_EQ(back.blocks, red.blocks);
  EXPECT_EQ(back.order(), red.order());
  const Complex s(0.3, 2.0);
  EXPECT_LT((back.evaluate(s) - red.evaluate(s)).norm(), 1e-15);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace phmor
