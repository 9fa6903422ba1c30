#include "spgo/structure.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spgo/rng.hpp"

namespace spgo {

namespace {

struct GaussInt {
  std::int64_t re = 0;
  std::int64_t im = 0;
};

// Sparse product of two basis matrices, accumulated into `out`.
void accumulate_product(std::span<const MatrixEntry> x, std::span<const MatrixEntry> y, int sign,
                        std::map<std::pair<int, int>, GaussInt>& out) {
  for (const auto& p : x)
    for (const auto& q : y) {
      if (p.col != q.row) continue;
      auto& v = out[{p.row, q.col}];
      v.re += sign * (p.re * q.re - p.im * q.im);
      v.im += sign * (p.re * q.im + p.im * q.re);
    }
}

std::string sparse_to_string(const std::map<BasisVector, std::int64_t>& v) {
  if (v.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [b, c] : v) {
    if (!first) os << " + ";
    os << c << "*" << b.to_string();
    first = false;
  }
  return os.str();
}

std::map<BasisVector, std::int64_t> to_map(const SparseBracket& s, const Basis& basis) {
  std::map<BasisVector, std::int64_t> out;
  for (const auto& t : s) out.emplace(basis[t.index], t.coeff);
  return out;
}

std::int64_t coefficient_of(const SparseBracket& s, std::size_t index) {
  for (const auto& t : s)
    if (t.index == index) return t.coeff;
  return 0;
}

}  // namespace

StructureTable build_table(int n, int max_n) {
  if (n < 1 || n > max_n)
    throw std::invalid_argument("structure table size must satisfy 1 <= n <= " + std::to_string(max_n));
  StructureTable table(n);
  const Basis& basis = table.basis_;
  const std::size_t dim = basis.size();

  // Basis matrices touching each position, for B(C, b_k) = -Trace(C b_k).
  std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, MatrixEntry>>> at_position;
  for (std::size_t k = 0; k < dim; ++k)
    for (const auto& e : basis.entries(k)) at_position[{e.row, e.col}].emplace_back(k, e);

  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      std::map<std::pair<int, int>, GaussInt> commutator;
      accumulate_product(basis.entries(i), basis.entries(j), 1, commutator);
      accumulate_product(basis.entries(j), basis.entries(i), -1, commutator);

      std::map<std::size_t, GaussInt> traces;
      for (const auto& [pos, v] : commutator) {
        if (v.re == 0 && v.im == 0) continue;
        auto it = at_position.find({pos.second, pos.first});
        if (it == at_position.end()) throw std::logic_error("commutator leaves sp(n)");
        for (const auto& [k, e] : it->second) {
          auto& t = traces[k];
          t.re += v.re * e.re - v.im * e.im;
          t.im += v.re * e.im + v.im * e.re;
        }
      }

      SparseBracket out;
      for (const auto& [k, t] : traces) {
        if (t.im != 0) throw std::logic_error("B(C, b) is not real");
        const std::int64_t numerator = -t.re;
        if (numerator == 0) continue;
        if (numerator % basis.norm_squared(k) != 0)
          throw std::logic_error("non-integral structure constant for [" + basis[i].name() + ", " +
                                 basis[j].name() + "]");
        out.push_back({k, numerator / basis.norm_squared(k)});
      }

      // The projection must reproduce the commutator exactly.
      std::map<std::pair<int, int>, GaussInt> rebuilt;
      for (const auto& t : out)
        for (const auto& e : basis.entries(t.index)) {
          auto& v = rebuilt[{e.row, e.col}];
          v.re += t.coeff * e.re;
          v.im += t.coeff * e.im;
        }
      for (const auto& [pos, v] : commutator) {
        const auto it = rebuilt.find(pos);
        const GaussInt r = it == rebuilt.end() ? GaussInt{} : it->second;
        if (r.re != v.re || r.im != v.im) throw std::logic_error("basis projection does not reconstruct the commutator");
      }
      table.entries_[i * dim + j] = std::move(out);
    }
  return table;
}

Element StructureTable::bracket(const Element& x, const Element& y) const {
  if (x.n() != n() || y.n() != n()) throw DimensionMismatch("element outside the table's sp(n)");
  Element out(n());
  for (const auto& [u, a] : x.coords())
    for (const auto& [v, b] : y.coords())
      for (const auto& t : (*this)(basis_.at(u), basis_.at(v))) out.add_term(basis_[t.index], a * b * t.coeff);
  return out;
}

std::string StructureTable::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j) {
      const auto& s = (*this)(i, j);
      if (s.empty()) continue;
      os << "[" << basis_[i].to_string() << ", " << basis_[j].to_string() << "] = ";
      for (std::size_t t = 0; t < s.size(); ++t) {
        if (t > 0) os << " + ";
        os << s[t].coeff << "*" << basis_[s[t].index].to_string();
      }
      os << "\n";
    }
  return os.str();
}

// ---------------------------------------------------------------------------
// Closed-form rows

namespace {

enum Idx { I, J, L, M };

struct Rule {
  int sign;
  Idx delta_a, delta_b;  // delta_{ab}
  Idx res_a, res_b;      // resulting basis symbol indices
};

using Row = std::array<Rule, 4>;

// Sign patterns shared by several rows.
constexpr Row kEE{{{+1, J, L, I, M}, {+1, I, M, J, L}, {-1, I, L, J, M}, {-1, J, M, I, L}}};
constexpr Row kEF{{{+1, J, L, I, M}, {-1, I, M, J, L}, {-1, I, L, J, M}, {+1, J, M, I, L}}};
constexpr Row kEGPrinted{{{-1, J, L, I, M}, {+1, I, M, J, L}, {-1, I, L, J, M}, {+1, J, M, I, L}}};
constexpr Row kAllMinus{{{-1, J, L, I, M}, {-1, I, M, J, L}, {-1, I, L, J, M}, {-1, J, M, I, L}}};
constexpr Row kAllPlus{{{+1, J, L, I, M}, {+1, I, M, J, L}, {+1, I, L, J, M}, {+1, J, M, I, L}}};

struct RowSpec {
  const Row* row;
  Kind result;
};

// Row for [x, y] with kind(x) <= kind(y).
RowSpec row_for(Kind x, Kind y, FormulaRows rows) {
  const Row* eg = rows == FormulaRows::Corrected ? &kEF : &kEGPrinted;
  switch (x) {
    case Kind::E:
      switch (y) {
        case Kind::E: return {&kEE, Kind::E};
        case Kind::F: return {&kEF, Kind::F};
        case Kind::G: return {eg, Kind::G};
        case Kind::H: return {eg, Kind::H};
      }
      break;
    case Kind::F:
      switch (y) {
        case Kind::F: return {&kAllMinus, Kind::E};
        case Kind::G: return {&kAllMinus, Kind::H};
        case Kind::H: return {&kAllPlus, Kind::G};
        default: break;
      }
      break;
    case Kind::G:
      switch (y) {
        case Kind::G: return {&kAllMinus, Kind::E};
        case Kind::H: return {&kAllMinus, Kind::F};
        default: break;
      }
      break;
    case Kind::H:
      if (y == Kind::H) return {&kAllMinus, Kind::E};
      break;
  }
  throw std::logic_error("no bracket row for kind pair");
}

}  // namespace

std::map<BasisVector, std::int64_t> delta_formula_bracket(const BasisVector& x, const BasisVector& y,
                                                          FormulaRows rows) {
  const bool swapped = x.kind > y.kind;
  const BasisVector& p = swapped ? y : x;
  const BasisVector& q = swapped ? x : y;
  const std::array<int, 4> idx{p.a, p.b, q.a, q.b};
  const RowSpec spec = row_for(p.kind, q.kind, rows);

  std::map<BasisVector, std::int64_t> out;
  for (const Rule& r : *spec.row) {
    if (idx[r.delta_a] != idx[r.delta_b]) continue;
    auto c = canonicalize(spec.result, idx[r.res_a], idx[r.res_b]);
    if (!c) continue;
    out[c->first] += (swapped ? -1 : 1) * r.sign * c->second;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

BracketLemmaReport verify_bracket_lemma(const StructureTable& table) {
  BracketLemmaReport report;
  report.n = table.n();
  const Basis& basis = table.basis();
  for (std::size_t i = 0; i < table.dim(); ++i)
    for (std::size_t j = 0; j < table.dim(); ++j) {
      ++report.pairs_checked;
      const auto commutator = to_map(table(i, j), basis);
      const auto formula = delta_formula_bracket(basis[i], basis[j], FormulaRows::Corrected);
      if (commutator != formula)
        report.mismatches.push_back({basis[i], basis[j], sparse_to_string(commutator), sparse_to_string(formula)});
      if (commutator != delta_formula_bracket(basis[i], basis[j], FormulaRows::Printed))
        ++report.printed_rows_mismatches;
    }
  return report;
}

namespace {

// [b_i, v] for a sparse integer vector v, accumulated into a dense buffer.
void bracket_into(const StructureTable& table, std::size_t i, const SparseBracket& v, std::int64_t sign,
                  std::vector<std::int64_t>& acc) {
  for (const auto& t : v)
    for (const auto& u : table(i, t.index)) acc[u.index] += sign * t.coeff * u.coeff;
}

bool jacobi_holds(const StructureTable& table, std::size_t x, std::size_t y, std::size_t z,
                  std::vector<std::int64_t>& acc) {
  std::fill(acc.begin(), acc.end(), 0);
  bracket_into(table, x, table(y, z), 1, acc);
  bracket_into(table, y, table(z, x), 1, acc);
  bracket_into(table, z, table(x, y), 1, acc);
  for (auto v : acc)
    if (v != 0) return false;
  return true;
}

bool invariance_holds(const StructureTable& table, std::size_t z, std::size_t x, std::size_t y) {
  const Basis& b = table.basis();
  return coefficient_of(table(z, x), y) * b.norm_squared(y) + coefficient_of(table(z, y), x) * b.norm_squared(x) == 0;
}

std::int64_t exact_b(const Basis& basis, std::size_t i, std::size_t j) {
  std::int64_t tr_re = 0;
  std::int64_t tr_im = 0;
  for (const auto& x : basis.entries(i))
    for (const auto& y : basis.entries(j))
      if (x.row == y.col && x.col == y.row) {
        tr_re += x.re * y.re - x.im * y.im;
        tr_im += x.re * y.im + x.im * y.re;
      }
  if (tr_im != 0) throw std::logic_error("Trace(b_i b_j) is not real");
  return -tr_re;
}

void check_antisymmetry_and_orthogonality(const StructureTable& table, TableIdentityReport& report) {
  const Basis& basis = table.basis();
  for (std::size_t i = 0; i < table.dim(); ++i)
    for (std::size_t j = 0; j < table.dim(); ++j) {
      const auto& a = table(i, j);
      const auto& b = table(j, i);
      bool anti = a.size() == b.size();
      for (std::size_t t = 0; anti && t < a.size(); ++t) anti = a[t].index == b[t].index && a[t].coeff == -b[t].coeff;
      if (!anti) ++report.antisymmetry_violations;
      const std::int64_t bij = exact_b(basis, i, j);
      if (i == j ? bij <= 0 : bij != 0) ++report.orthogonality_violations;
    }
}

}  // namespace

TableIdentityReport verify_table_identities(const StructureTable& table) {
  TableIdentityReport report;
  check_antisymmetry_and_orthogonality(table, report);
  std::vector<std::int64_t> acc(table.dim());
  for (std::size_t x = 0; x < table.dim(); ++x)
    for (std::size_t y = 0; y < table.dim(); ++y)
      for (std::size_t z = 0; z < table.dim(); ++z) {
        ++report.jacobi_triples;
        ++report.invariance_triples;
        if (!jacobi_holds(table, x, y, z, acc)) ++report.jacobi_violations;
        if (!invariance_holds(table, x, y, z)) ++report.invariance_violations;
      }
  return report;
}

TableIdentityReport verify_table_identities_sampled(const StructureTable& table, std::size_t count,
                                                    std::uint64_t seed) {
  TableIdentityReport report;
  check_antisymmetry_and_orthogonality(table, report);
  auto rng = stream_rng(seed, Stream::IdentityTriples);
  std::uniform_int_distribution<std::size_t> pick(0, table.dim() - 1);
  std::vector<std::int64_t> acc(table.dim());
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t x = pick(rng), y = pick(rng), z = pick(rng);
    ++report.jacobi_triples;
    ++report.invariance_triples;
    if (!jacobi_holds(table, x, y, z, acc)) ++report.jacobi_violations;
    if (!invariance_holds(table, x, y, z)) ++report.invariance_violations;
  }
  return report;
}

// ---------------------------------------------------------------------------

OrthonormalStructure::OrthonormalStructure(const StructureTable& table)
    : scales_(table.dim()), terms_(table.dim() * table.dim()) {
  const Basis& basis = table.basis();
  for (std::size_t i = 0; i < dim(); ++i) scales_[i] = std::sqrt(static_cast<double>(basis.norm_squared(i)));
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      for (const auto& t : table(i, j))
        terms_[i * dim() + j].push_back(
            {t.index, static_cast<double>(t.coeff) * scales_[t.index] / (scales_[i] * scales_[j])});
}

Eigen::VectorXd OrthonormalStructure::bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) {
    const double xi = x(static_cast<Eigen::Index>(i));
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < dim(); ++j) {
      const double yj = y(static_cast<Eigen::Index>(j));
      if (yj == 0.0) continue;
      for (const auto& t : terms(i, j)) out(static_cast<Eigen::Index>(t.index)) += xi * yj * t.coeff;
    }
  }
  return out;
}

Eigen::MatrixXd OrthonormalStructure::ad(std::size_t i) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t j = 0; j < dim(); ++j)
    for (const auto& t : terms(i, j)) m(static_cast<Eigen::Index>(t.index), static_cast<Eigen::Index>(j)) += t.coeff;
  return m;
}

}  // namespace spgo
