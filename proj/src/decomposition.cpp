#include "spgo/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "spgo/rng.hpp"

namespace spgo {

// ---------------------------------------------------------------------------
// Construction

Decomposition build_decomposition(const Partition& p, std::shared_ptr<const SpAlgebra> algebra) {
  if (!algebra || algebra->table.n() != p.n())
    throw std::invalid_argument("algebra does not match partition " + p.to_string());
  Decomposition d(p, std::move(algebra));
  const Basis& basis = d.basis();

  std::map<ModuleLabel, std::vector<std::size_t>> spans;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const int bi = p.block_of(basis[k].a);
    const int bj = p.block_of(basis[k].b);  // a <= b, so bi <= bj
    ModuleLabel label;
    if (bi == bj)
      label = bi == 0 ? ModuleLabel::n_block() : ModuleLabel::h(bi);
    else if (bi == 0)
      label = ModuleLabel::msub(bj, basis[k].a);
    else
      label = ModuleLabel::m(bi, bj);
    spans[label].push_back(k);
  }

  for (int j = 1; j <= p.s(); ++j) {
    Module h{ModuleLabel::h(j), spans[ModuleLabel::h(j)]};
    d.h_indices_.insert(d.h_indices_.end(), h.indices.begin(), h.indices.end());
    d.h_factors_.push_back(std::move(h));
  }

  auto add = [&](const ModuleLabel& label) {
    auto it = spans.find(label);
    if (it == spans.end() || it->second.empty()) return;
    d.m_indices_.insert(d.m_indices_.end(), it->second.begin(), it->second.end());
    d.modules_.push_back({label, it->second});
  };
  add(ModuleLabel::n_block());
  for (int j = 1; j <= p.s(); ++j)
    for (int l = 1; l <= p.n0(); ++l) add(ModuleLabel::msub(j, l));
  for (int i = 1; i <= p.s(); ++i)
    for (int j = i + 1; j <= p.s(); ++j) add(ModuleLabel::m(i, j));

  d.m_position_.assign(basis.size(), -1);
  for (std::size_t pos = 0; pos < d.m_indices_.size(); ++pos)
    d.m_position_[d.m_indices_[pos]] = static_cast<std::ptrdiff_t>(pos);
  return d;
}

Decomposition build_decomposition(const Partition& p) {
  return build_decomposition(p, std::make_shared<const SpAlgebra>(p.n()));
}

std::optional<Module> Decomposition::find(const ModuleLabel& label) const {
  using T = ModuleLabel::Type;
  const int s = partition_.s();
  switch (label.type) {
    case T::H:
      if (label.j < 1 || label.j > s) return std::nullopt;
      return h_factors_[static_cast<std::size_t>(label.j - 1)];
    case T::M:
      if (label.i == 0 && label.j >= 1 && label.j <= s) {
        Module agg{label, {}};
        for (const auto& m : modules_)
          if (m.label.type == T::Msub && m.label.j == label.j)
            agg.indices.insert(agg.indices.end(), m.indices.begin(), m.indices.end());
        std::sort(agg.indices.begin(), agg.indices.end());
        if (agg.indices.empty()) return std::nullopt;
        return agg;
      }
      [[fallthrough]];
    default:
      for (const auto& m : modules_)
        if (m.label == label) return m;
      return std::nullopt;
  }
}

std::optional<std::size_t> Decomposition::m_position(std::size_t basis_index) const {
  const auto pos = m_position_.at(basis_index);
  if (pos < 0) return std::nullopt;
  return static_cast<std::size_t>(pos);
}

std::size_t Decomposition::expected_dim_m(const Partition& p) {
  long long dim = 2LL * p.n() * p.n() + p.n0();
  for (int nj : p.parts()) dim -= 2LL * nj * nj;
  return static_cast<std::size_t>(dim);
}

// ---------------------------------------------------------------------------
// Exact relation checks

bool RelationsReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.ok(); });
}

std::size_t RelationsReport::violation_count() const {
  std::size_t total = 0;
  for (const auto& c : checks) total += c.violations.size();
  return total;
}

namespace {

std::string pair_name(const Basis& basis, std::size_t x, std::size_t y) {
  return "[" + basis[x].name() + ", " + basis[y].name() + "]";
}

class RelationChecker {
 public:
  explicit RelationChecker(const Decomposition& d) : d_(d), member_(d.basis().size()) {}

  // Every bracket [x, y], x in P, y in Q, lies in `target`; when `spans`,
  // the brackets also span all of target. An empty target means "vanishes".
  void inclusion(RelationCheck& check, const std::vector<std::size_t>& p, const std::vector<std::size_t>& q,
                 const std::vector<std::size_t>& target, const std::string& target_name, bool spans) {
    std::fill(member_.begin(), member_.end(), -1);
    for (std::size_t t = 0; t < target.size(); ++t) member_[target[t]] = static_cast<int>(t);
    std::vector<std::vector<Rational>> rows;
    for (std::size_t x : p)
      for (std::size_t y : q) {
        ++check.pairs_checked;
        const auto& br = d_.table()(x, y);
        std::vector<Rational> row(target.size(), Rational{0});
        bool inside = true;
        for (const auto& t : br) {
          if (member_[t.index] < 0) {
            inside = false;
            break;
          }
          row[static_cast<std::size_t>(member_[t.index])] = t.coeff;
        }
        if (!inside)
          check.violations.push_back(pair_name(d_.basis(), x, y) + " leaves " + target_name);
        else if (spans && !br.empty())
          rows.push_back(std::move(row));
      }
    if (spans) {
      const std::size_t rank = exact_rank(std::move(rows));
      if (rank != target.size())
        check.violations.push_back("brackets span a subspace of dimension " + std::to_string(rank) + " of " +
                                   target_name + " (dimension " + std::to_string(target.size()) + ")");
    }
  }

 private:
  const Decomposition& d_;
  std::vector<int> member_;
};

}  // namespace

RelationsReport verify_bracket_relations(const Decomposition& d) {
  const Partition& p = d.partition();
  const int s = p.s();
  RelationsReport report;
  RelationChecker checker(d);

  {
    RelationCheck c{"module dimensions"};
    auto expect = [&](const std::string& name, std::size_t got, std::size_t want) {
      if (got != want)
        c.violations.push_back("dim " + name + " = " + std::to_string(got) + ", expected " + std::to_string(want));
    };
    expect("m", d.dim_m(), Decomposition::expected_dim_m(p));
    expect("h + m", d.dim_h() + d.dim_m(), d.basis().size());
    for (const auto& h : d.h_factors())
      expect(h.label.to_string(), h.dim(), sp_dimension(p.block_size(h.label.j)));
    for (const auto& m : d.modules()) {
      using T = ModuleLabel::Type;
      const auto& L = m.label;
      const std::size_t want = L.type == T::N      ? sp_dimension(p.n0())
                               : L.type == T::Msub ? static_cast<std::size_t>(4 * p.block_size(L.j))
                                                   : static_cast<std::size_t>(4 * p.block_size(L.i) * p.block_size(L.j));
      expect(L.to_string(), m.dim(), want);
    }
    std::set<std::size_t> all(d.h_indices().begin(), d.h_indices().end());
    all.insert(d.m_indices().begin(), d.m_indices().end());
    if (all.size() != d.basis().size()) c.violations.push_back("h and m do not partition the basis");
    report.checks.push_back(std::move(c));
  }

  {
    RelationCheck c{"ad(h)-invariance of every module"};
    for (const auto& m : d.modules())
      checker.inclusion(c, d.h_indices(), m.indices, m.indices, m.label.to_string(), false);
    report.checks.push_back(std::move(c));
  }

  const auto n_block = d.find(ModuleLabel::n_block());
  {
    RelationCheck c{"[N, N] in N"};
    if (n_block) checker.inclusion(c, n_block->indices, n_block->indices, n_block->indices, "N", false);
    report.checks.push_back(std::move(c));
  }

  {
    RelationCheck c{"[m_ij, m_jk] = m_ik"};
    for (int i = 0; i <= s; ++i)
      for (int j = i + 1; j <= s; ++j)
        for (int k = j + 1; k <= s; ++k) {
          const auto a = d.find(ModuleLabel::m(i, j));
          const auto b = d.find(ModuleLabel::m(j, k));
          const auto t = d.find(ModuleLabel::m(i, k));
          if (!a || !b || !t) continue;
          checker.inclusion(c, a->indices, b->indices, t->indices, t->label.to_string(), true);
        }
    report.checks.push_back(std::move(c));
  }

  {
    RelationCheck c{"[sp(n_i), m_lm] = m_lm if i in {l, m}, else 0"};
    for (int i = 0; i <= s; ++i) {
      const auto factor = i == 0 ? n_block : d.find(ModuleLabel::h(i));
      if (!factor) continue;
      for (int l = 0; l <= s; ++l)
        for (int m = l + 1; m <= s; ++m) {
          const auto target = d.find(ModuleLabel::m(l, m));
          if (!target) continue;
          const bool acts = i == l || i == m;
          checker.inclusion(c, factor->indices, target->indices, acts ? target->indices : std::vector<std::size_t>{},
                            acts ? target->label.to_string() : "{0}", acts);
        }
    }
    report.checks.push_back(std::move(c));
  }

  {
    RelationCheck c{"[N, m_ij] in m_ij if i = 0, else 0"};
    if (n_block)
      for (int i = 0; i <= s; ++i)
        for (int j = i + 1; j <= s; ++j) {
          const auto target = d.find(ModuleLabel::m(i, j));
          if (!target) continue;
          checker.inclusion(c, n_block->indices, target->indices, i == 0 ? target->indices : std::vector<std::size_t>{},
                            i == 0 ? target->label.to_string() : "{0}", false);
        }
    report.checks.push_back(std::move(c));
  }

  {
    RelationCheck c{"[m_1, m_2] orthogonal to h for distinct modules"};
    std::vector<bool> in_h(d.basis().size(), false);
    for (auto k : d.h_indices()) in_h[k] = true;
    const auto& mods = d.modules();
    for (std::size_t a = 0; a < mods.size(); ++a)
      for (std::size_t b = 0; b < mods.size(); ++b) {
        if (a == b) continue;
        for (auto x : mods[a].indices)
          for (auto y : mods[b].indices) {
            ++c.pairs_checked;
            for (const auto& t : d.table()(x, y))
              if (in_h[t.index]) {
                c.violations.push_back(pair_name(d.basis(), x, y) + " has a component along " +
                                       d.basis()[t.index].name());
                break;
              }
          }
      }
    report.checks.push_back(std::move(c));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Float checks

NormalizerReport normalizer_check(const Decomposition& d, double rank_tol) {
  const auto& ortho = d.ortho();
  const auto dim_g = static_cast<Eigen::Index>(d.basis().size());
  const auto dim_m = static_cast<Eigen::Index>(d.dim_m());
  NormalizerReport report;
  report.expected_dim = d.dim_h();
  if (const auto n_block = d.find(ModuleLabel::n_block())) report.expected_dim += n_block->dim();

  // Rows: m-component of [Y, u_a] for every h basis vector a.
  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.dim_h()) * dim_m, dim_g);
  for (std::size_t ai = 0; ai < d.dim_h(); ++ai) {
    const std::size_t a = d.h_indices()[ai];
    for (Eigen::Index y = 0; y < dim_g; ++y)
      for (const auto& t : ortho.terms(static_cast<std::size_t>(y), a))
        if (const auto pos = d.m_position(t.index))
          constraints(static_cast<Eigen::Index>(ai) * dim_m + static_cast<Eigen::Index>(*pos), y) += t.coeff;
  }
  const Eigen::MatrixXd normalizer = nullspace(constraints, rank_tol);
  report.computed_dim = static_cast<std::size_t>(normalizer.cols());

  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(dim_g, static_cast<Eigen::Index>(report.expected_dim));
  Eigen::Index col = 0;
  for (auto k : d.h_indices()) expected(static_cast<Eigen::Index>(k), col++) = 1.0;
  if (const auto n_block = d.find(ModuleLabel::n_block()))
    for (auto k : n_block->indices) expected(static_cast<Eigen::Index>(k), col++) = 1.0;

  Eigen::MatrixXd joined(dim_g, normalizer.cols() + expected.cols());
  joined << normalizer, expected;
  report.span_match = report.computed_dim == report.expected_dim && numerical_rank(joined, rank_tol) == report.expected_dim;
  return report;
}

Eigen::MatrixXd restricted_ad(const Decomposition& d, std::size_t h_basis_index, const Module& module, double tol) {
  const auto dim = static_cast<Eigen::Index>(module.dim());
  std::map<std::size_t, Eigen::Index> position;
  for (Eigen::Index k = 0; k < dim; ++k) position[module.indices[static_cast<std::size_t>(k)]] = k;
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l)
    for (const auto& t : d.ortho().terms(h_basis_index, module.indices[static_cast<std::size_t>(l)])) {
      const auto it = position.find(t.index);
      if (it == position.end()) {
        if (std::abs(t.coeff) > tol)
          throw std::invalid_argument(module.label.to_string() + " is not ad(h)-invariant");
        continue;
      }
      rho(it->second, l) += t.coeff;
    }
  return rho;
}

namespace {

Eigen::VectorXd embed(const std::vector<std::size_t>& indices, const Eigen::VectorXd& coords, std::size_t dim_g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_g));
  for (std::size_t k = 0; k < indices.size(); ++k)
    out(static_cast<Eigen::Index>(indices[k])) = coords(static_cast<Eigen::Index>(k));
  return out;
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
  return v / v.norm();
}

std::optional<InequivalenceWitness> find_witness(const Decomposition& d, const Module& first, const Module& second,
                                                 std::uint64_t seed, double rank_tol) {
  constexpr int kSamplePairs = 3;
  constexpr double kNonzero = 1e-8;
  const std::size_t dim_g = d.basis().size();
  const auto dim_h = static_cast<Eigen::Index>(d.dim_h());
  std::optional<InequivalenceWitness> found;
  for (int sample = 0; sample < kSamplePairs; ++sample) {
    auto rng = stream_rng(seed, Stream::Equivalence, 1000 + static_cast<std::uint64_t>(sample));
    const Eigen::VectorXd x = embed(first.indices, random_unit(rng, static_cast<Eigen::Index>(first.dim())), dim_g);
    const Eigen::VectorXd y = embed(second.indices, random_unit(rng, static_cast<Eigen::Index>(second.dim())), dim_g);

    Eigen::MatrixXd ad_x(static_cast<Eigen::Index>(dim_g), dim_h);
    for (Eigen::Index a = 0; a < dim_h; ++a) {
      Eigen::VectorXd ua = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_g));
      ua(static_cast<Eigen::Index>(d.h_indices()[static_cast<std::size_t>(a)])) = 1.0;
      ad_x.col(a) = d.ortho().bracket(ua, x);
    }
    const Eigen::MatrixXd annihilator = nullspace(ad_x, rank_tol);
    std::optional<InequivalenceWitness> here;
    for (Eigen::Index c = 0; c < annihilator.cols() && !here; ++c) {
      const Eigen::VectorXd a = embed(d.h_indices(), annihilator.col(c), dim_g);
      const double by = d.ortho().bracket(a, y).norm();
      if (by <= kNonzero) continue;
      InequivalenceWitness w;
      w.a = annihilator.col(c);
      w.bracket_x_norm = d.ortho().bracket(a, x).norm();
      w.bracket_y_norm = by;
      Eigen::Index offset = 0;
      double best = -1;
      for (const auto& f : d.h_factors()) {
        const double norm = w.a.segment(offset, static_cast<Eigen::Index>(f.dim())).norm();
        w.factor_norms.push_back(norm);
        if (norm > best) {
          best = norm;
          w.dominant_factor = f.label.j;
        }
        offset += static_cast<Eigen::Index>(f.dim());
      }
      here = std::move(w);
    }
    if (!here) return std::nullopt;
    if (!found) found = std::move(here);
  }
  return found;
}

}  // namespace

EquivalenceResult module_equivalence(const Decomposition& d, const ModuleLabel& first, const ModuleLabel& second,
                                     std::uint64_t seed, double rank_tol) {
  const auto a = d.find(first);
  const auto b = d.find(second);
  if (!a || !b) throw std::invalid_argument("unknown module label for partition " + d.partition().to_string());
  if (first.type == ModuleLabel::Type::H || second.type == ModuleLabel::Type::H)
    throw std::invalid_argument("equivalence is decided for submodules of m only");

  EquivalenceResult result;
  result.first = first;
  result.second = second;
  const auto da = static_cast<Eigen::Index>(a->dim());
  const auto db = static_cast<Eigen::Index>(b->dim());
  const Eigen::Index unknowns = da * db;

  // phi rho_a(x) = rho_b(x) phi, with phi stored column-major (db x da).
  Eigen::MatrixXd constraints(static_cast<Eigen::Index>(d.dim_h()) * unknowns, unknowns);
  Eigen::Index row = 0;
  for (auto h : d.h_indices()) {
    const Eigen::MatrixXd ra = restricted_ad(d, h, *a);
    const Eigen::MatrixXd rb = restricted_ad(d, h, *b);
    constraints.middleRows(row, unknowns) =
        Eigen::kroneckerProduct(ra.transpose(), Eigen::MatrixXd::Identity(db, db)) -
        Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(da, da), rb);
    row += unknowns;
  }
  const Eigen::MatrixXd intertwiners = nullspace(constraints, rank_tol);
  result.intertwiner_dim = static_cast<std::size_t>(intertwiners.cols());

  if (da == db && intertwiners.cols() > 0) {
    for (std::uint64_t trial = 0; trial < 3 && !result.equivalent; ++trial) {
      auto rng = stream_rng(seed, Stream::Equivalence, trial);
      const Eigen::VectorXd c = random_unit(rng, intertwiners.cols());
      const Eigen::VectorXd flat = intertwiners * c;
      const Eigen::MatrixXd phi = Eigen::Map<const Eigen::MatrixXd>(flat.data(), db, da);
      const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(phi).singularValues();
      result.equivalent = sv(sv.size() - 1) > 1e-8 * sv(0);
    }
  }
  if (!result.equivalent) result.witness = find_witness(d, *a, *b, seed, rank_tol);
  return result;
}

std::vector<ModuleLabel> equivalence_labels(const Decomposition& d) {
  std::vector<ModuleLabel> out;
  for (const auto& m : d.modules()) out.push_back(m.label);
  if (d.partition().n0() >= 2)
    for (int j = 1; j <= d.partition().s(); ++j) out.push_back(ModuleLabel::m(0, j));
  return out;
}

}  // namespace spgo
