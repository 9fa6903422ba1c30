#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spgo/rational.hpp"

namespace spgo {

/// The four families of the canonical basis of sp(n).
enum class Kind : std::uint8_t { E, F, G, H };

char kind_char(Kind k);
std::optional<Kind> kind_from_char(char c);

/// A canonical basis vector e_ab (a < b) or f_ab, g_ab, h_ab (a <= b).
/// Indices are 1-based, as in the usual matrix notation.
struct BasisVector {
  Kind kind = Kind::E;
  int a = 1;
  int b = 2;

  /// Rejects non-canonical index pairs; use canonicalize() for those.
  BasisVector(Kind k, int a_, int b_);

  std::string to_string() const;  // "e 1 2"
  std::string name() const;       // "e_12"

  friend auto operator<=>(const BasisVector&, const BasisVector&) = default;
};

/// A basis symbol with arbitrary index order, reduced by e_ba = -e_ab,
/// f_ba = f_ab, g_ba = g_ab, h_ba = h_ab and e_aa = 0. Returns nullopt for
/// the vanishing symbol e_aa.
std::optional<std::pair<BasisVector, int>> canonicalize(Kind k, int a, int b);

/// One nonzero entry of a basis matrix: 0-based position, value in Z[i].
struct MatrixEntry {
  int row;
  int col;
  std::int64_t re;
  std::int64_t im;
};

/// The ordered canonical basis of sp(n), n(2n+1) vectors sorted by (a, b, kind).
class Basis {
 public:
  explicit Basis(int n);

  int n() const { return n_; }
  std::size_t size() const { return vectors_.size(); }
  const BasisVector& operator[](std::size_t i) const { return vectors_[i]; }
  std::span<const BasisVector> vectors() const { return vectors_; }

  std::optional<std::size_t> index_of(const BasisVector& v) const;
  std::size_t at(const BasisVector& v) const;  // throws std::out_of_range

  /// B(b, b) = -Trace(b b): 8 for f_aa, g_aa, h_aa and 4 otherwise.
  std::int64_t norm_squared(std::size_t i) const { return norms_[i]; }

  /// Sparse 2n x 2n matrix of basis vector i.
  std::span<const MatrixEntry> entries(std::size_t i) const { return entries_[i]; }

 private:
  int n_;
  std::vector<BasisVector> vectors_;
  std::vector<std::int64_t> norms_;
  std::vector<std::vector<MatrixEntry>> entries_;
};

/// Matrix entries of a single basis vector in the complex 2n x 2n embedding.
std::vector<MatrixEntry> basis_matrix_entries(const BasisVector& v, int n);

inline std::size_t sp_dimension(int n) { return static_cast<std::size_t>(n) * (2 * n + 1); }

}  // namespace spgo
