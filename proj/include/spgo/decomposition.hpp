#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spgo/linalg.hpp"
#include "spgo/structure.hpp"

namespace spgo {

class PartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data (n; n_1, ..., n_s) of Sp(n)/Sp(n_1) x ... x Sp(n_s). Block 0
/// (size n0 = n - sum n_i) occupies indices 1..n0, block j follows.
class Partition {
 public:
  Partition(int n, std::vector<int> parts);

  int n() const { return n_; }
  const std::vector<int>& parts() const { return parts_; }
  int s() const { return static_cast<int>(parts_.size()); }
  int n0() const { return n0_; }

  /// Size, first and last (1-based, inclusive) index of block j, j = 0..s.
  int block_size(int j) const;
  int block_begin(int j) const;
  int block_end(int j) const;
  /// Block containing the 1-based matrix index.
  int block_of(int index) const;

  std::string to_string() const;  // "3:1+1"

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int n_;
  std::vector<int> parts_;
  int n0_;
};

/// Parses "n:n1+n2+...+ns" with no whitespace.
Partition parse_partition(std::string_view text);

/// Every partition of n up to reordering of the parts: parts nonincreasing,
/// s >= 1, sum <= n.
std::vector<Partition> enumerate_partitions(int n);

/// Names a subspace of sp(n): N = sp(n0), H j = sp(n_j), M i j (i < j, the
/// aggregate m_0j when i = 0) and Msub j l (the l-th row slice of m_0j).
struct ModuleLabel {
  enum class Type : std::uint8_t { N, H, M, Msub };
  Type type = Type::N;
  int i = 0;
  int j = 0;
  int l = 0;

  static ModuleLabel n_block() { return {Type::N, 0, 0, 0}; }
  static ModuleLabel h(int j) { return {Type::H, 0, j, 0}; }
  static ModuleLabel m(int i, int j) { return {Type::M, i, j, 0}; }
  static ModuleLabel msub(int j, int l) { return {Type::Msub, 0, j, l}; }

  std::string to_string() const;  // "N", "H1", "M12", "M01.2"

  friend auto operator<=>(const ModuleLabel&, const ModuleLabel&) = default;
};

ModuleLabel parse_module_label(std::string_view text);

/// A span of canonical basis vectors, stored as basis indices.
struct Module {
  ModuleLabel label;
  std::vector<std::size_t> indices;
  std::size_t dim() const { return indices.size(); }
};

/// Reductive decomposition sp(n) = h + m with m split into the modules N,
/// m_l^j (as Msub j l) and m_ij for 1 <= i < j.
class Decomposition {
 public:
  const Partition& partition() const { return partition_; }
  const SpAlgebra& algebra() const { return *algebra_; }
  const StructureTable& table() const { return algebra_->table; }
  const OrthonormalStructure& ortho() const { return algebra_->ortho; }
  const Basis& basis() const { return algebra_->table.basis(); }

  const std::vector<Module>& h_factors() const { return h_factors_; }
  const std::vector<std::size_t>& h_indices() const { return h_indices_; }

  /// Modules of m in coordinate order: N, then Msub j l (j, l ascending),
  /// then M i j for 1 <= i < j. Empty modules are omitted.
  const std::vector<Module>& modules() const { return modules_; }
  const std::vector<std::size_t>& m_indices() const { return m_indices_; }

  std::size_t dim_h() const { return h_indices_.size(); }
  std::size_t dim_m() const { return m_indices_.size(); }

  /// Any named span, including aggregates M 0 j and the factors H j.
  /// Returns nullopt for labels outside this partition.
  std::optional<Module> find(const ModuleLabel& label) const;

  /// Position of a basis index inside m_indices(), if it lies in m.
  std::optional<std::size_t> m_position(std::size_t basis_index) const;

  /// 2n^2 - 2 sum n_j^2 + n0.
  static std::size_t expected_dim_m(const Partition& p);

  friend Decomposition build_decomposition(const Partition& p, std::shared_ptr<const SpAlgebra> algebra);

 private:
  Decomposition(Partition p, std::shared_ptr<const SpAlgebra> algebra)
      : partition_(std::move(p)), algebra_(std::move(algebra)) {}

  Partition partition_;
  std::shared_ptr<const SpAlgebra> algebra_;
  std::vector<Module> h_factors_;
  std::vector<std::size_t> h_indices_;
  std::vector<Module> modules_;
  std::vector<std::size_t> m_indices_;
  std::vector<std::ptrdiff_t> m_position_;
};

Decomposition build_decomposition(const Partition& p, std::shared_ptr<const SpAlgebra> algebra);
Decomposition build_decomposition(const Partition& p);

// ---------------------------------------------------------------------------
// Structural verification

struct RelationCheck {
  RelationCheck() = default;
  explicit RelationCheck(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t pairs_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct RelationsReport {
  std::vector<RelationCheck> checks;
  bool ok() const;
  std::size_t violation_count() const;
};

/// Exhaustive exact checks over basis pairs: module dimensions, ad(h)
/// invariance, [N,N] in N, [m_ij, m_jk] = m_ik, the action of each sp(n_i)
/// on m_lm, [N, m_ij], and [m_1, m_2] orthogonal to h for distinct modules.
RelationsReport verify_bracket_relations(const Decomposition& d);

struct NormalizerReport {
  std::size_t computed_dim = 0;
  std::size_t expected_dim = 0;  // dim h + dim N
  bool span_match = false;
  bool ok() const { return computed_dim == expected_dim && span_match; }
};

/// Solves {Y in g : [Y, h] in h} and compares it with h + N.
NormalizerReport normalizer_check(const Decomposition& d, double rank_tol = kDefaultRankTol);

/// Matrix of ad(u_a)|_M in orthonormal coordinates, for h basis index a.
/// Throws std::invalid_argument if M is not ad(u_a)-invariant.
Eigen::MatrixXd restricted_ad(const Decomposition& d, std::size_t h_basis_index, const Module& module,
                              double tol = 1e-10);

struct InequivalenceWitness {
  Eigen::VectorXd a;                 // in orthonormal coordinates of h (h_indices order)
  std::vector<double> factor_norms;  // |projection of a on sp(n_j)|, j = 1..s
  int dominant_factor = 0;           // j with the largest projection
  double bracket_x_norm = 0;         // |[a, X]|
  double bracket_y_norm = 0;         // |[a, Y]|
};

struct EquivalenceResult {
  ModuleLabel first;
  ModuleLabel second;
  bool equivalent = false;
  std::size_t intertwiner_dim = 0;
  std::optional<InequivalenceWitness> witness;
};

/// Decides ad(h)-equivalence of two invariant modules from the space of
/// intertwiners: equivalent iff a generic intertwiner is invertible (three
/// seeded random combinations). For inequivalent modules, also searches for
/// a in h with [a, X] = 0 and [a, Y] != 0 on sampled X, Y.
EquivalenceResult module_equivalence(const Decomposition& d, const ModuleLabel& first, const ModuleLabel& second,
                                     std::uint64_t seed = 42, double rank_tol = kDefaultRankTol);

/// Labels used for the equivalence matrix: every module of m, plus the
/// aggregates M 0 j when they split into several row slices.
std::vector<ModuleLabel> equivalence_labels(const Decomposition& d);

}  // namespace spgo
