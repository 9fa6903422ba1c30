#include <gtest/gtest.h>

#include "oracle.hpp"
#include "spgo/structure.hpp"

using namespace spgo;

namespace {

BasisVector bv(char k, int a, int b) { return BasisVector(*kind_from_char(k), a, b); }

std::map<std::string, std::int64_t> named(const StructureTable& t, const SparseBracket& br) {
  std::map<std::string, std::int64_t> out;
  for (const auto& term : br) out[t.basis()[term.index].name()] = term.coeff;
  return out;
}

std::map<std::string, std::int64_t> named(const std::map<BasisVector, std::int64_t>& m) {
  std::map<std::string, std::int64_t> out;
  for (const auto& [v, c] : m) out[v.name()] = c;
  return out;
}

}  // namespace

TEST(StructureTable, Examples) {
  StructureTable t2 = build_table(2);
  const Basis& b = t2.basis();
  EXPECT_TRUE(t2(b.at(bv('e', 1, 2)), b.at(bv('e', 1, 2))).empty());
  using M = std::map<std::string, std::int64_t>;
  EXPECT_EQ(named(t2, t2(b.at(bv('g', 1, 2)), b.at(bv('h', 1, 2)))), (M{{"f_11", -1}, {"f_22", -1}}));
  EXPECT_EQ(named(t2, t2(b.at(bv('e', 1, 2)), b.at(bv('f', 1, 2)))), (M{{"f_11", 1}, {"f_22", -1}}));

  StructureTable t1 = build_table(1);
  EXPECT_EQ(named(t1, t1(0, 1)), (M{{"h_11", -4}}));  // [f_11, g_11]
}

TEST(StructureTable, MatchesOracleCommutators) {
  for (int n = 1; n <= 3; ++n) {
    StructureTable t = build_table(n);
    auto ref = oracle::basis(n);
    for (std::size_t i = 0; i < t.dim(); ++i)
      for (std::size_t j = 0; j < t.dim(); ++j) {
        const auto mi = oracle::matrix(ref[i], n), mj = oracle::matrix(ref[j], n);
        Eigen::VectorXd want = oracle::coords(mi * mj - mj * mi, n);
        Eigen::VectorXd got = Eigen::VectorXd::Zero(want.size());
        for (const auto& term : t(i, j)) got(term.index) = static_cast<double>(term.coeff);
        EXPECT_LT((got - want).norm(), 1e-10) << ref[i].name() << "," << ref[j].name();
      }
  }
}

TEST(StructureTable, BracketOfElements) {
  StructureTable t = build_table(3);
  Element x(3), y(3);
  x.add_term(bv('e', 1, 2), Rational(2));
  x.add_term(bv('f', 3, 3), Rational(1, 2));
  y.add_term(bv('e', 1, 3), Rational(1));
  y.add_term(bv('g', 2, 3), Rational(-3));
  EXPECT_EQ(t.bracket(x, y), bracket(x, y));
}

TEST(StructureTable, RefusesLargeN) {
  EXPECT_THROW(build_table(7), std::invalid_argument);
  EXPECT_THROW(build_table(0), std::invalid_argument);
  EXPECT_NO_THROW(build_table(7, 7));
}

TEST(StructureTable, TextExport) {
  StructureTable t = build_table(3);
  const std::string text = t.to_text();
  EXPECT_NE(text.find("[e 1 2, e 1 3] = -1*e 2 3\n"), std::string::npos);
  EXPECT_EQ(text.find("[e 1 2, e 1 2]"), std::string::npos);
}

TEST(DeltaFormula, Examples) {
  using M = std::map<std::string, std::int64_t>;
  EXPECT_EQ(named(delta_formula_bracket(bv('e', 1, 2), bv('e', 1, 3))), (M{{"e_23", -1}}));
  EXPECT_EQ(named(delta_formula_bracket(bv('g', 1, 2), bv('h', 1, 2))), (M{{"f_11", -1}, {"f_22", -1}}));
  EXPECT_EQ(named(delta_formula_bracket(bv('e', 1, 2), bv('f', 1, 2))), (M{{"f_11", 1}, {"f_22", -1}}));
  EXPECT_EQ(named(delta_formula_bracket(bv('f', 1, 1), bv('g', 1, 1))), (M{{"h_11", -4}}));
}

TEST(DeltaFormula, MatchesCommutatorsExactly) {
  const std::size_t expected_pairs[] = {0, 9, 100, 441, 1296};
  for (int n = 1; n <= 4; ++n) {
    BracketLemmaReport r = verify_bracket_lemma(build_table(n));
    EXPECT_EQ(r.pairs_checked, expected_pairs[n]);
    EXPECT_TRUE(r.ok()) << r.mismatches.size() << " mismatches at n=" << n;
  }
}

TEST(DeltaFormula, PrintedSignsOfEGAndEHRowsDisagree) {
  // With the first two terms of the [e,g] and [e,h] rows sign-flipped the
  // formula no longer matches the commutator once n >= 2.
  EXPECT_EQ(verify_bracket_lemma(build_table(1)).printed_rows_mismatches, 0u);
  EXPECT_GT(verify_bracket_lemma(build_table(2)).printed_rows_mismatches, 0u);
  auto printed = delta_formula_bracket(bv('e', 1, 2), bv('g', 2, 2), FormulaRows::Printed);
  auto corrected = delta_formula_bracket(bv('e', 1, 2), bv('g', 2, 2));
  EXPECT_NE(printed, corrected);
}

TEST(Identities, ExhaustiveUpToN3) {
  for (int n = 1; n <= 3; ++n) {
    TableIdentityReport r = verify_table_identities(build_table(n));
    const std::size_t d = sp_dimension(n);
    EXPECT_EQ(r.jacobi_triples, d * d * d);
    EXPECT_TRUE(r.ok()) << "n=" << n;
  }
}

TEST(Identities, SampledAtN4) {
  TableIdentityReport r = verify_table_identities_sampled(build_table(4), 1000, 42);
  EXPECT_EQ(r.jacobi_triples, 1000u);
  EXPECT_EQ(r.invariance_triples, 1000u);
  EXPECT_TRUE(r.ok());
}

TEST(OrthonormalStructure, AgreesWithScaledTable) {
  SpAlgebra alg(3);
  const auto& o = alg.ortho;
  auto ref = oracle::basis(3);
  for (std::size_t i = 0; i < o.dim(); ++i) {
    const auto m = oracle::matrix(ref[i], 3);
    EXPECT_NEAR(o.scale(i), std::sqrt(oracle::killing(m, m)), 1e-14);
  }
  // ad(u_i) is B-skew in orthonormal coordinates.
  for (std::size_t i = 0; i < o.dim(); ++i) EXPECT_LT((o.ad(i) + o.ad(i).transpose()).norm(), 1e-12);
  Eigen::VectorXd x = Eigen::VectorXd::Unit(o.dim(), 0), y = Eigen::VectorXd::Unit(o.dim(), 3);
  EXPECT_LT((o.bracket(x, y) - o.ad(0) * y).norm(), 1e-14);
}
