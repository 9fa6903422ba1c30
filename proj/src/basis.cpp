#include "spgo/basis.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace spgo {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

char kind_char(Kind k) {
  switch (k) {
    case Kind::E: return 'e';
    case Kind::F: return 'f';
    case Kind::G: return 'g';
    case Kind::H: return 'h';
  }
  return '?';
}

std::optional<Kind> kind_from_char(char c) {
  switch (c) {
    case 'e': return Kind::E;
    case 'f': return Kind::F;
    case 'g': return Kind::G;
    case 'h': return Kind::H;
    default: return std::nullopt;
  }
}

BasisVector::BasisVector(Kind k, int a_, int b_) : kind(k), a(a_), b(b_) {
  if (a < 1 || b < 1) throw std::invalid_argument("basis indices are 1-based");
  if (k == Kind::E ? a >= b : a > b)
    throw std::invalid_argument("non-canonical basis vector " + std::string(1, kind_char(k)) + " " +
                                std::to_string(a) + " " + std::to_string(b));
}

std::string BasisVector::to_string() const {
  return std::string(1, kind_char(kind)) + " " + std::to_string(a) + " " + std::to_string(b);
}

std::string BasisVector::name() const {
  return std::string(1, kind_char(kind)) + "_" + std::to_string(a) + std::to_string(b);
}

std::optional<std::pair<BasisVector, int>> canonicalize(Kind k, int a, int b) {
  if (k == Kind::E) {
    if (a == b) return std::nullopt;
    if (a < b) return std::pair{BasisVector{k, a, b}, 1};
    return std::pair{BasisVector{k, b, a}, -1};
  }
  return std::pair{BasisVector{k, std::min(a, b), std::max(a, b)}, 1};
}

namespace {

// Elementary matrices E_ab, F_ab, G_ab, H_ab (0-based a, b) as sparse entries.
void add_elementary(std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>>& acc,
                    Kind k, int a, int b, int n, int sign) {
  auto put = [&](int r, int c, std::int64_t re, std::int64_t im) {
    auto& v = acc[{r, c}];
    v.first += sign * re;
    v.second += sign * im;
  };
  switch (k) {
    case Kind::E:
      put(a, b, 1, 0);
      put(n + a, n + b, 1, 0);
      break;
    case Kind::F:
      put(a, b, 0, 1);
      put(n + a, n + b, 0, -1);
      break;
    case Kind::G:
      put(a, n + b, -1, 0);
      put(n + b, a, 1, 0);
      break;
    case Kind::H:
      put(a, n + b, 0, 1);
      put(n + b, a, 0, 1);
      break;
  }
}

}  // namespace

std::vector<MatrixEntry> basis_matrix_entries(const BasisVector& v, int n) {
  if (v.b > n) throw std::out_of_range("basis vector " + v.name() + " outside sp(" + std::to_string(n) + ")");
  std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> acc;
  const int a = v.a - 1;
  const int b = v.b - 1;
  // e_ab = E_ab - E_ba; the other families use the symmetric sum, so the
  // diagonal vectors carry a factor 2.
  add_elementary(acc, v.kind, a, b, n, 1);
  add_elementary(acc, v.kind, b, a, n, v.kind == Kind::E ? -1 : 1);

  std::vector<MatrixEntry> out;
  for (const auto& [pos, val] : acc)
    if (val.first != 0 || val.second != 0) out.push_back({pos.first, pos.second, val.first, val.second});
  return out;
}

Basis::Basis(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("sp(n) requires n >= 1");
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b)
      for (Kind k : {Kind::E, Kind::F, Kind::G, Kind::H}) {
        if (k == Kind::E && a == b) continue;
        vectors_.emplace_back(k, a, b);
      }
  for (const auto& v : vectors_) {
    entries_.push_back(basis_matrix_entries(v, n));
    // -Trace(b b) summed over entry pairs (r, c), (c, r); always real here.
    std::int64_t tr_re = 0;
    for (const auto& x : entries_.back())
      for (const auto& y : entries_.back())
        if (x.row == y.col && x.col == y.row) tr_re += x.re * y.re - x.im * y.im;
    norms_.push_back(-tr_re);
  }
}

std::optional<std::size_t> Basis::index_of(const BasisVector& v) const {
  auto it = std::lower_bound(vectors_.begin(), vectors_.end(), v, [](const BasisVector& x, const BasisVector& y) {
    return std::tie(x.a, x.b, x.kind) < std::tie(y.a, y.b, y.kind);
  });
  if (it == vectors_.end() || !(*it == v)) return std::nullopt;
  return static_cast<std::size_t>(it - vectors_.begin());
}

std::size_t Basis::at(const BasisVector& v) const {
  auto i = index_of(v);
  if (!i) throw std::out_of_range("basis vector " + v.name() + " not in sp(" + std::to_string(n_) + ")");
  return *i;
}

}  // namespace spgo
