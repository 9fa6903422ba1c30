#include <gtest/gtest.h>

#include "spgo/classifier.hpp"

using namespace spgo;

namespace {

Decomposition decomp(const char* p) { return build_decomposition(parse_partition(p)); }

std::size_t passing(const ScanResult& s) {
  std::size_t k = 0;
  for (const auto& c : s.candidates) k += c.outcome == Outcome::Pass;
  return k;
}

}  // namespace

TEST(Commutant, Dimensions) {
  EXPECT_EQ(commutant_basis(decomp("2:1+1")).dim(), 1u);
  EXPECT_EQ(commutant_basis(decomp("2:1")).dim(), 7u);
  EXPECT_EQ(commutant_basis(decomp("3:2+1")).dim(), 1u);
  EXPECT_EQ(commutant_basis(decomp("2:2")).dim(), 0u);
}

TEST(Commutant, BasisIsOrthonormalSymmetricAndEquivariant) {
  for (const char* p : {"2:1", "3:1+1", "4:1+1"}) {
    auto d = decomp(p);
    auto c = commutant_basis(d);
    for (std::size_t i = 0; i < c.dim(); ++i) {
      EXPECT_LT((c.basis[i] - c.basis[i].transpose()).norm(), 1e-12);
      EXPECT_LT(equivariance_residual(c.basis[i], d), 1e-10) << p;
      for (std::size_t j = 0; j < c.dim(); ++j)
        EXPECT_NEAR(c.basis[i].cwiseProduct(c.basis[j]).sum(), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Commutant, SplitAggregateCouplesEquivalentSlices) {
  // (4;1,1): m_01 splits into two equivalent slices, so the commutant
  // contains operators mixing them; it is strictly larger than the count of
  // irreducible summands plus the symmetric operators on N.
  auto d = decomp("4:1+1");
  std::size_t modules = d.modules().size();
  EXPECT_GT(commutant_basis(d).dim(), modules);
}

TEST(Expected, CaseSplit) {
  EXPECT_EQ(expected_summary(parse_partition("2:1")), Summary::OneParameterFamily);
  EXPECT_EQ(expected_summary(parse_partition("5:4")), Summary::OneParameterFamily);
  EXPECT_EQ(expected_summary(parse_partition("3:1+1")), Summary::StandardOnly);
  EXPECT_EQ(expected_summary(parse_partition("4:2+1")), Summary::StandardOnly);
  EXPECT_EQ(expected_summary(parse_partition("3:1")), Summary::StandardOnly);
  EXPECT_EQ(expected_summary(parse_partition("2:2")), Summary::StandardOnly);
  EXPECT_EQ(to_string(Summary::OneParameterFamily), "one-parameter-family");
}

TEST(Allowed, HomothetyAndGMu) {
  auto d = decomp("2:1");
  EXPECT_TRUE(allowed_metric(metric_operator(parse_metric_spec("diag:N=2,M01=2"), d), d).allowed);
  EXPECT_TRUE(allowed_metric(metric_operator(parse_metric_spec("diag:N=5"), d), d).allowed);
  auto d3 = decomp("3:1+1");
  EXPECT_FALSE(allowed_metric(metric_operator(parse_metric_spec("diag:N=2"), d3), d3).allowed);
  EXPECT_TRUE(allowed_metric(metric_operator(parse_metric_spec("diag:N=2,M01=2,M02=2,M12=2"), d3), d3).allowed);
}

TEST(ScanDiagonal, ThreeOneOne) {
  auto d = decomp("3:1+1");
  ScanResult s = scan_diagonal(d, {1.0, 2.0});
  EXPECT_EQ(s.candidates.size(), 16u);
  EXPECT_EQ(passing(s), 2u);
  for (const auto& c : s.candidates)
    if (c.outcome == Outcome::Pass) EXPECT_LT(c.allowed.homothety_deviation, 1e-12) << c.description;
  EXPECT_EQ(s.summary, Summary::StandardOnly);
  EXPECT_TRUE(s.violations.empty());
  ASSERT_TRUE(s.min_failing_residual);
  EXPECT_GT(*s.min_failing_residual, 1e-4);
}

TEST(ScanDiagonal, FamilyCaseAllPass) {
  ScanResult s = scan_diagonal(decomp("2:1"), {1.0, 2.0});
  EXPECT_EQ(s.candidates.size(), 4u);
  EXPECT_EQ(passing(s), 4u);
  EXPECT_EQ(s.summary, Summary::OneParameterFamily);
}

TEST(ScanDiagonal, EmptyM) {
  ScanResult s = scan_diagonal(decomp("2:2"), {1.0, 2.0});
  EXPECT_EQ(s.summary, Summary::StandardOnly);
  EXPECT_TRUE(s.violations.empty());
}

TEST(ScanDiagonal, BudgetSubsamplingKeepsConstants) {
  auto d = decomp("4:1+1");  // six modules -> 64 assignments
  ScanConfig cfg;
  cfg.budget = 10;
  ScanResult s = scan_diagonal(d, {1.0, 2.0}, cfg);
  EXPECT_EQ(s.candidates.size(), 10u);
  EXPECT_FALSE(s.notes.empty());
  EXPECT_EQ(passing(s), 2u);
  ScanResult again = scan_diagonal(d, {1.0, 2.0}, cfg);
  for (std::size_t k = 0; k < s.candidates.size(); ++k)
    EXPECT_EQ(s.candidates[k].description, again.candidates[k].description);
  EXPECT_THROW(scan_diagonal(d, {}), std::invalid_argument);
}

TEST(ScanCommutant, FamilyCaseOnlyScalarBlocksPass) {
  auto d = decomp("2:1");
  ScanResult s = scan_commutant(d, commutant_basis(d), 100);
  EXPECT_TRUE(s.violations.empty());
  for (const auto& c : s.candidates)
    if (c.outcome == Outcome::Pass) {
      ASSERT_TRUE(c.allowed.n_block_deviation);
      EXPECT_LT(*c.allowed.n_block_deviation, 1e-8) << c.description;
    }
  EXPECT_EQ(s.summary, Summary::OneParameterFamily);
}

TEST(ScanCommutant, OnlyHomothetiesPass) {
  auto d = decomp("3:1+1");
  ScanResult s = scan_commutant(d, commutant_basis(d), 100);
  EXPECT_TRUE(s.violations.empty());
  EXPECT_EQ(passing(s), 1u);
  EXPECT_EQ(s.summary, Summary::StandardOnly);
}

TEST(ScanCommutant, ZeroSamples) {
  auto d = decomp("2:1");
  ScanResult s = scan_commutant(d, commutant_basis(d), 0);
  ASSERT_EQ(s.candidates.size(), 1u);
  EXPECT_EQ(s.candidates.front().description, "standard");
  EXPECT_EQ(s.candidates.front().outcome, Outcome::Pass);
}

TEST(EigenvalueGraphTest, Connectivity) {
  auto g = eigenvalue_graph(decomp("3:1+1"));
  EXPECT_EQ(g.nodes.size(), 3u);
  EXPECT_TRUE(g.connected());
  for (int n = 2; n <= 5; ++n)
    for (const auto& p : enumerate_partitions(n)) EXPECT_TRUE(eigenvalue_graph(build_decomposition(p)).connected()) << p.to_string();
  auto single = eigenvalue_graph(decomp("2:1"));
  EXPECT_EQ(single.nodes.size(), 1u);
  EXPECT_TRUE(single.edges.empty());
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(parse_partition("2:1")).observed, Summary::OneParameterFamily);
  Classification c = classify(parse_partition("3:1+1"));
  EXPECT_EQ(c.observed, Summary::StandardOnly);
  EXPECT_TRUE(c.agrees());
  EXPECT_TRUE(classify(parse_partition("4:2+1")).agrees());
}
