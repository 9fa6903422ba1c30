#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "spgo/decomposition.hpp"

using namespace spgo;

namespace {

// dim m by counting oracle basis vectors outside the isotropy blocks.
std::size_t oracle_dim_m(int n, const std::vector<int>& parts) {
  const auto bl = oracle::blocks(n, parts);
  std::size_t count = 0;
  for (const auto& v : oracle::basis(n)) {
    auto [i, j] = oracle::block_pair(v, bl);
    if (!(i == j && i > 0)) ++count;
  }
  return count;
}

// Normalizer dimension of h in g from the oracle matrices: Y with
// [Y, h_k] having no component outside h for every k.
std::size_t oracle_normalizer_dim(int n, const std::vector<int>& parts) {
  const auto bl = oracle::blocks(n, parts);
  const auto bs = oracle::basis(n);
  std::vector<bool> in_h;
  for (const auto& v : bs) {
    auto [i, j] = oracle::block_pair(v, bl);
    in_h.push_back(i == j && i > 0);
  }
  const auto hs = oracle::isotropy(n, parts);
  const auto dim = static_cast<Eigen::Index>(bs.size());
  Eigen::MatrixXd sys(static_cast<Eigen::Index>(hs.size()) * dim, dim);
  sys.setZero();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto y = oracle::matrix(bs[c], n);
    for (std::size_t k = 0; k < hs.size(); ++k) {
      Eigen::VectorXd co = oracle::coords(y * hs[k] - hs[k] * y, n);
      for (Eigen::Index r = 0; r < dim; ++r)
        if (!in_h[r]) sys(static_cast<Eigen::Index>(k) * dim + r, c) = co(r);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
  return static_cast<std::size_t>(dim) - rank;
}

std::map<std::string, std::size_t> module_dims(const Decomposition& d) {
  std::map<std::string, std::size_t> out;
  for (const auto& m : d.modules()) out[m.label.to_string()] = m.dim();
  return out;
}

}  // namespace

TEST(Partition, ParseAndPrint) {
  Partition p = parse_partition("5:2+1");
  EXPECT_EQ(p.n(), 5);
  EXPECT_EQ(p.s(), 2);
  EXPECT_EQ(p.n0(), 2);
  EXPECT_EQ(p.block_begin(0), 1);
  EXPECT_EQ(p.block_end(0), 2);
  EXPECT_EQ(p.block_begin(1), 3);
  EXPECT_EQ(p.block_end(2), 5);
  EXPECT_EQ(p.block_of(4), 1);
  EXPECT_EQ(p.to_string(), "5:2+1");
}

TEST(Partition, RejectsBadInput) {
  for (const char* bad : {"2:3", "3:", "3", ":1", "3:0+1", "3:1+", "x:1", "3:1 +1", "0:1", "3:-1"})
    EXPECT_THROW(parse_partition(bad), PartitionError) << bad;
}

TEST(Partition, Enumeration) {
  // Multisets of positive parts with sum <= n.
  EXPECT_EQ(enumerate_partitions(1).size(), 1u);   // 1:1
  EXPECT_EQ(enumerate_partitions(2).size(), 3u);   // 2:2, 2:1, 2:1+1
  EXPECT_EQ(enumerate_partitions(3).size(), 6u);
  EXPECT_EQ(enumerate_partitions(4).size(), 11u);
  for (const auto& p : enumerate_partitions(5))
    for (int j = 1; j < p.s(); ++j) EXPECT_GE(p.parts()[j - 1], p.parts()[j]);
}

TEST(ModuleLabelTest, RoundTrip) {
  for (const char* s : {"N", "H1", "M12", "M01", "M01.2", "M23"})
    EXPECT_EQ(parse_module_label(s).to_string(), s);
  for (const char* bad : {"", "X", "M1", "M21", "H", "M01.0", "M12.1"})
    EXPECT_THROW(parse_module_label(bad), std::invalid_argument) << bad;
}

TEST(Decomposition, Examples) {
  using M = std::map<std::string, std::size_t>;
  auto d21 = build_decomposition(parse_partition("2:1"));
  EXPECT_EQ(d21.dim_m(), 7u);
  EXPECT_EQ(module_dims(d21), (M{{"N", 3}, {"M01.1", 4}}));

  auto d211 = build_decomposition(parse_partition("2:1+1"));
  EXPECT_EQ(d211.dim_m(), 4u);
  EXPECT_EQ(module_dims(d211), (M{{"M12", 4}}));

  auto d311 = build_decomposition(parse_partition("3:1+1"));
  EXPECT_EQ(d311.dim_m(), 15u);
  EXPECT_EQ(module_dims(d311), (M{{"N", 3}, {"M01.1", 4}, {"M02.1", 4}, {"M12", 4}}));
  EXPECT_EQ(d311.find(ModuleLabel::m(0, 1))->dim(), 4u);

  auto d411 = build_decomposition(parse_partition("4:1+1"));
  EXPECT_EQ(d411.find(ModuleLabel::m(0, 2))->dim(), 8u);
  EXPECT_EQ(module_dims(d411).at("M01.2"), 4u);

  auto d22 = build_decomposition(parse_partition("2:2"));
  EXPECT_EQ(d22.dim_m(), 0u);
  EXPECT_TRUE(d22.modules().empty());
}

TEST(Decomposition, DimensionIdentityExhaustive) {
  for (int n = 1; n <= 5; ++n)
    for (const auto& p : enumerate_partitions(n)) {
      auto d = build_decomposition(p);
      EXPECT_EQ(d.dim_m(), Decomposition::expected_dim_m(p)) << p.to_string();
      EXPECT_EQ(d.dim_m(), oracle_dim_m(n, p.parts())) << p.to_string();
      EXPECT_EQ(d.dim_h() + d.dim_m(), sp_dimension(n));
    }
}

TEST(Decomposition, ModulesPartitionM) {
  auto d = build_decomposition(parse_partition("5:2+1"));
  std::set<std::size_t> seen;
  for (const auto& m : d.modules())
    for (auto i : m.indices) EXPECT_TRUE(seen.insert(i).second);
  EXPECT_EQ(seen.size(), d.dim_m());
  for (std::size_t k = 0; k < d.m_indices().size(); ++k) EXPECT_EQ(d.m_position(d.m_indices()[k]), k);
  for (auto h : d.h_indices()) EXPECT_FALSE(d.m_position(h));
  EXPECT_FALSE(d.find(ModuleLabel::m(2, 3)));
}

TEST(Relations, HoldForAllSmallPartitions) {
  for (int n = 1; n <= 4; ++n)
    for (const auto& p : enumerate_partitions(n)) {
      RelationsReport r = verify_bracket_relations(build_decomposition(p));
      EXPECT_TRUE(r.ok()) << p.to_string() << ": " << r.violation_count() << " violations";
    }
}

TEST(Relations, SpanOfSpOneOnM12) {
  auto r = verify_bracket_relations(build_decomposition(parse_partition("2:1+1")));
  bool found = false;
  for (const auto& c : r.checks)
    if (c.name.find("sp(n_i)") != std::string::npos) {
      found = true;
      EXPECT_GT(c.pairs_checked, 0u);
      EXPECT_TRUE(c.ok());
    }
  EXPECT_TRUE(found);
}

TEST(Relations, VacuousWhenMIsZero) {
  auto r = verify_bracket_relations(build_decomposition(parse_partition("3:3")));
  EXPECT_TRUE(r.ok());
}

TEST(Normalizer, Examples) {
  EXPECT_EQ(normalizer_check(build_decomposition(parse_partition("2:1"))).computed_dim, 6u);
  EXPECT_EQ(normalizer_check(build_decomposition(parse_partition("2:1+1"))).computed_dim, 6u);
  EXPECT_EQ(normalizer_check(build_decomposition(parse_partition("3:1+1"))).computed_dim, 9u);
}

TEST(Normalizer, MatchesOracleAndSpan) {
  for (int n = 1; n <= 3; ++n)
    for (const auto& p : enumerate_partitions(n)) {
      NormalizerReport r = normalizer_check(build_decomposition(p));
      EXPECT_TRUE(r.ok()) << p.to_string();
      EXPECT_EQ(r.computed_dim, oracle_normalizer_dim(n, p.parts())) << p.to_string();
    }
}

TEST(RestrictedAd, RejectsNonInvariantSubspace) {
  auto d = build_decomposition(parse_partition("3:1+1"));
  Module mixed{ModuleLabel::m(1, 2), {d.find(ModuleLabel::m(1, 2))->indices[0], d.find(ModuleLabel::n_block())->indices[0]}};
  EXPECT_THROW(restricted_ad(d, d.h_indices()[0], mixed), std::invalid_argument);
}

TEST(Equivalence, RowSlicesAreEquivalent) {
  auto d = build_decomposition(parse_partition("4:1+1"));
  auto r = module_equivalence(d, ModuleLabel::msub(1, 1), ModuleLabel::msub(1, 2));
  EXPECT_TRUE(r.equivalent);
  EXPECT_GT(r.intertwiner_dim, 0u);
  EXPECT_FALSE(r.witness);
}

TEST(Equivalence, DistinctBlockPairsAreInequivalent) {
  auto d = build_decomposition(parse_partition("3:1+1"));
  auto r = module_equivalence(d, ModuleLabel::m(0, 1), ModuleLabel::m(1, 2));
  EXPECT_FALSE(r.equivalent);
  EXPECT_EQ(r.intertwiner_dim, 0u);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->dominant_factor, 2);  // sp(n_2) kills m_01 but not m_12
  EXPECT_LT(r.witness->bracket_x_norm, 1e-10);
  EXPECT_GT(r.witness->bracket_y_norm, 1e-3);
}

TEST(Equivalence, ModuleWithItself) {
  auto d = build_decomposition(parse_partition("3:1+1"));
  for (const auto& m : d.modules()) EXPECT_TRUE(module_equivalence(d, m.label, m.label).equivalent);
}

TEST(Equivalence, LabelsIncludeAggregatesOnlyWhenSplit) {
  auto d3 = build_decomposition(parse_partition("3:1+1"));
  EXPECT_EQ(equivalence_labels(d3).size(), d3.modules().size());
  auto d4 = build_decomposition(parse_partition("4:1+1"));
  EXPECT_EQ(equivalence_labels(d4).size(), d4.modules().size() + 2);
}
