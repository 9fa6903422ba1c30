#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spgo/basis.hpp"
#include "spgo/liealg.hpp"

namespace spgo {

/// Integer coefficient of basis vector `index` in a bracket.
struct Term {
  std::size_t index;
  std::int64_t coeff;
};

using SparseBracket = std::vector<Term>;  // sorted by index, no zeros

inline constexpr int kDefaultMaxTableN = 6;

/// Exact structure constants of sp(n) over the canonical basis, computed
/// from matrix commutators of the basis matrices.
class StructureTable {
 public:
  int n() const { return basis_.n(); }
  const Basis& basis() const { return basis_; }
  std::size_t dim() const { return basis_.size(); }

  const SparseBracket& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim() + j]; }

  Element bracket(const Element& x, const Element& y) const;

  /// Canonical text form, one line per nonzero bracket [x, y] with x before
  /// y in basis order: `[e 1 2, e 1 3] = -1*e 2 3`.
  std::string to_text() const;

  friend StructureTable build_table(int n, int max_n);

 private:
  explicit StructureTable(int n) : basis_(n), entries_(basis_.size() * basis_.size()) {}

  Basis basis_;
  std::vector<SparseBracket> entries_;
};

StructureTable build_table(int n, int max_n = kDefaultMaxTableN);

/// Which version of the closed-form [e, g] and [e, h] rows to evaluate.
/// `Printed` uses the signs as typeset in the source (first two terms
/// flipped), `Corrected` the signs that match the matrix commutator.
enum class FormulaRows { Corrected, Printed };

/// Closed-form delta-formula bracket of two basis vectors, with coincident
/// indices resolved by the canonicalization rules.
std::map<BasisVector, std::int64_t> delta_formula_bracket(const BasisVector& x, const BasisVector& y,
                                                          FormulaRows rows = FormulaRows::Corrected);

struct BracketMismatch {
  BasisVector x;
  BasisVector y;
  std::string commutator;
  std::string formula;
};

struct BracketLemmaReport {
  int n = 0;
  std::size_t pairs_checked = 0;
  std::vector<BracketMismatch> mismatches;
  /// Mismatch count when the printed [e, g], [e, h] rows are used verbatim.
  std::size_t printed_rows_mismatches = 0;
  bool ok() const { return mismatches.empty(); }
};

BracketLemmaReport verify_bracket_lemma(const StructureTable& table);

struct TableIdentityReport {
  std::size_t antisymmetry_violations = 0;
  std::size_t jacobi_triples = 0;
  std::size_t jacobi_violations = 0;
  std::size_t orthogonality_violations = 0;
  std::size_t invariance_triples = 0;
  std::size_t invariance_violations = 0;
  bool ok() const {
    return antisymmetry_violations == 0 && jacobi_violations == 0 && orthogonality_violations == 0 &&
           invariance_violations == 0;
  }
};

/// Exhaustive antisymmetry, Jacobi, B-orthogonality of the basis and
/// B([z,x],y) + B(x,[z,y]) = 0 over all basis triples, in exact arithmetic.
TableIdentityReport verify_table_identities(const StructureTable& table);

/// Jacobi and Ad-invariance on `count` random basis triples drawn from the
/// given seed.
TableIdentityReport verify_table_identities_sampled(const StructureTable& table, std::size_t count,
                                                    std::uint64_t seed);

/// Float structure constants in the B-orthonormal basis u_i = b_i / |b_i|.
class OrthonormalStructure {
 public:
  explicit OrthonormalStructure(const StructureTable& table);

  std::size_t dim() const { return scales_.size(); }
  /// |b_i| = sqrt(B(b_i, b_i)).
  double scale(std::size_t i) const { return scales_[i]; }

  struct FloatTerm {
    std::size_t index;
    double coeff;
  };
  std::span<const FloatTerm> terms(std::size_t i, std::size_t j) const { return terms_[i * dim() + j]; }

  /// [x, y] for vectors in orthonormal coordinates.
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// Matrix of ad(u_i) in orthonormal coordinates.
  Eigen::MatrixXd ad(std::size_t i) const;

 private:
  std::vector<double> scales_;
  std::vector<std::vector<FloatTerm>> terms_;
};

}  // namespace spgo

namespace spgo {

/// sp(n) with its exact table and float orthonormal structure, built once
/// and shared by every decomposition of the same n.
struct SpAlgebra {
  explicit SpAlgebra(int n, int max_n = kDefaultMaxTableN) : table(build_table(n, max_n)), ortho(table) {}

  StructureTable table;
  OrthonormalStructure ortho;
};

}  // namespace spgo
