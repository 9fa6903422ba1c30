#include "spgo/liealg.hpp"

#include <cmath>
#include <sstream>

namespace spgo {

MembershipError::MembershipError(std::string block, double magnitude)
    : std::runtime_error("matrix is not in sp(n): " + block + " violation of magnitude " +
                         std::to_string(magnitude)),
      block_(std::move(block)),
      magnitude_(magnitude) {}

// ---------------------------------------------------------------------------
// ExactMatrix

ExactMatrix::ExactMatrix(int n) : n_(n), data_(static_cast<std::size_t>(4 * n * n)) {}

ExactMatrix ExactMatrix::operator*(const ExactMatrix& o) const {
  if (n_ != o.n_) throw DimensionMismatch("matrix product of different sizes");
  ExactMatrix out(n_);
  const int m = size();
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const auto& x = (*this)(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < m; ++j) {
        const auto& y = o(k, j);
        if (!y.is_zero()) out(i, j) += x * y;
      }
    }
  return out;
}

ExactMatrix ExactMatrix::operator-(const ExactMatrix& o) const {
  if (n_ != o.n_) throw DimensionMismatch("matrix difference of different sizes");
  ExactMatrix out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
  return out;
}

GaussianRational ExactMatrix::trace() const {
  GaussianRational t;
  for (int i = 0; i < size(); ++i) t += (*this)(i, i);
  return t;
}

bool ExactMatrix::is_zero() const {
  for (const auto& x : data_)
    if (!x.is_zero()) return false;
  return true;
}

Eigen::MatrixXcd ExactMatrix::to_complex() const {
  Eigen::MatrixXcd m(size(), size());
  for (int r = 0; r < size(); ++r)
    for (int c = 0; c < size(); ++c) {
      const auto& x = (*this)(r, c);
      m(r, c) = {boost::rational_cast<double>(x.re), boost::rational_cast<double>(x.im)};
    }
  return m;
}

// ---------------------------------------------------------------------------
// Element

Element::Element(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("sp(n) requires n >= 1");
}

Element Element::basis_vector(int n, const BasisVector& v) {
  if (v.b > n) throw std::out_of_range("basis vector " + v.name() + " outside sp(" + std::to_string(n) + ")");
  Element x(n);
  x.coords_.emplace(v, Rational{1});
  return x;
}

Rational Element::coefficient(const BasisVector& v) const {
  auto it = coords_.find(v);
  return it == coords_.end() ? Rational{0} : it->second;
}

void Element::add_term(const BasisVector& v, const Rational& c) {
  if (v.b > n_) throw std::out_of_range("basis vector " + v.name() + " outside sp(" + std::to_string(n_) + ")");
  if (c.numerator() == 0) return;
  auto [it, inserted] = coords_.try_emplace(v, c);
  if (!inserted) {
    it->second += c;
    if (it->second.numerator() == 0) coords_.erase(it);
  }
}

Element& Element::operator+=(const Element& o) {
  if (n_ != o.n_) throw DimensionMismatch("adding elements of sp(" + std::to_string(n_) + ") and sp(" +
                                          std::to_string(o.n_) + ")");
  for (const auto& [v, c] : o.coords_) add_term(v, c);
  return *this;
}

Element& Element::operator-=(const Element& o) {
  if (n_ != o.n_) throw DimensionMismatch("subtracting elements of sp(" + std::to_string(n_) + ") and sp(" +
                                          std::to_string(o.n_) + ")");
  for (const auto& [v, c] : o.coords_) add_term(v, -c);
  return *this;
}

Element operator*(const Rational& c, const Element& x) {
  Element out(x.n_);
  if (c.numerator() == 0) return out;
  for (const auto& [v, a] : x.coords_) out.coords_.emplace(v, c * a);
  return out;
}

std::string Element::to_string() const {
  if (coords_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coords_) {
    Rational mag = c.numerator() < 0 ? -c : c;
    if (first)
      os << (c.numerator() < 0 ? "-" : "");
    else
      os << (c.numerator() < 0 ? " - " : " + ");
    if (mag != Rational{1}) os << spgo::to_string(mag) << "*";
    os << v.name();
    first = false;
  }
  return os.str();
}

std::string to_string(ArithmeticMode m) { return m == ArithmeticMode::Exact ? "exact" : "float"; }

ArithmeticMode parse_arithmetic_mode(const std::string& s) {
  if (s == "exact") return ArithmeticMode::Exact;
  if (s == "float") return ArithmeticMode::Float;
  throw std::invalid_argument("arithmetic mode must be 'exact' or 'float', got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Conversions

std::vector<BasisMatrix> build_basis(int n) {
  Basis basis(n);
  std::vector<BasisMatrix> out;
  out.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    ExactMatrix m(n);
    for (const auto& e : basis.entries(i)) m(e.row, e.col) = {Rational{e.re}, Rational{e.im}};
    out.push_back({basis[i], std::move(m)});
  }
  return out;
}

ExactMatrix to_matrix(const Element& x) {
  ExactMatrix m(x.n());
  for (const auto& [v, c] : x.coords())
    for (const auto& e : basis_matrix_entries(v, x.n())) m(e.row, e.col) += GaussianRational{c * e.re, c * e.im};
  return m;
}

Eigen::MatrixXcd to_complex_matrix(const Element& x) { return to_matrix(x).to_complex(); }

namespace {

double magnitude(const GaussianRational& z) {
  return std::hypot(boost::rational_cast<double>(z.re), boost::rational_cast<double>(z.im));
}

// Largest violation of each sp(n) block condition, evaluated on entry
// accessors so the exact and float paths share one definition.
template <typename At, typename Conj, typename Mag>
void check_blocks(int n, At at, Conj conj, Mag mag, double tol) {
  double anti_hermitian = 0, x_block = 0, y_symmetric = 0, y_block = 0;
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) anti_hermitian = std::max(anti_hermitian, mag(at(r, c) + conj(at(c, r))));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      x_block = std::max(x_block, mag(at(n + r, n + c) - conj(at(r, c))));
      y_symmetric = std::max(y_symmetric, mag(at(n + r, c) - at(n + c, r)));
      y_block = std::max(y_block, mag(at(r, n + c) + conj(at(n + r, c))));
    }
  if (anti_hermitian > tol) throw MembershipError("anti-Hermitian", anti_hermitian);
  if (x_block > tol) throw MembershipError("X block (bottom-right != conj(top-left))", x_block);
  if (y_symmetric > tol) throw MembershipError("Y block symmetry", y_symmetric);
  if (y_block > tol) throw MembershipError("Y block (top-right != -conj(bottom-left))", y_block);
}

}  // namespace

Element from_matrix(const ExactMatrix& m) {
  const int n = m.n();
  check_blocks(
      n, [&](int r, int c) { return m(r, c); }, [](const GaussianRational& z) { return z.conj(); },
      [](const GaussianRational& z) { return magnitude(z); }, 0.0);

  Basis basis(n);
  Element x(n);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    // B(M, b) = -Trace(M b) = -sum over entries b(r, c) of M(c, r) b(r, c).
    GaussianRational acc;
    for (const auto& e : basis.entries(i)) acc += m(e.col, e.row) * GaussianRational{Rational{e.re}, Rational{e.im}};
    if (acc.im.numerator() != 0) throw std::logic_error("B(M, b) has a nonzero imaginary part for an sp(n) matrix");
    x.add_term(basis[i], -acc.re / basis.norm_squared(i));
  }
  if (!(to_matrix(x) - m).is_zero()) throw std::logic_error("from_matrix reconstruction is not exact");
  return x;
}

void check_membership(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw DimensionMismatch("sp(n) matrices are 2n x 2n");
  const int n = static_cast<int>(m.rows() / 2);
  check_blocks(
      n, [&](int r, int c) { return m(r, c); }, [](const std::complex<double>& z) { return std::conj(z); },
      [](const std::complex<double>& z) { return std::abs(z); }, tol);
}

Eigen::VectorXd from_complex_matrix(const Eigen::MatrixXcd& m, double tol) {
  check_membership(m, tol);
  const int n = static_cast<int>(m.rows() / 2);
  Basis basis(n);
  Eigen::VectorXd coords(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::complex<double> acc = 0;
    for (const auto& e : basis.entries(i))
      acc += m(e.col, e.row) * std::complex<double>(static_cast<double>(e.re), static_cast<double>(e.im));
    coords(static_cast<Eigen::Index>(i)) = -acc.real() / static_cast<double>(basis.norm_squared(i));
  }
  return coords;
}

Eigen::MatrixXcd to_complex_matrix(const Eigen::VectorXd& coords, const Basis& basis) {
  if (static_cast<std::size_t>(coords.size()) != basis.size())
    throw DimensionMismatch("coordinate vector does not match the basis of sp(" + std::to_string(basis.n()) + ")");
  const int m = 2 * basis.n();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double c = coords(static_cast<Eigen::Index>(i));
    if (c == 0.0) continue;
    for (const auto& e : basis.entries(i))
      out(e.row, e.col) += c * std::complex<double>(static_cast<double>(e.re), static_cast<double>(e.im));
  }
  return out;
}

Element bracket(const Element& x, const Element& y) {
  if (x.n() != y.n()) throw DimensionMismatch("bracket of elements of different sp(n)");
  const ExactMatrix mx = to_matrix(x);
  const ExactMatrix my = to_matrix(y);
  return from_matrix(mx * my - my * mx);
}

Rational inner_product_b(const Element& x, const Element& y) {
  if (x.n() != y.n()) throw DimensionMismatch("B of elements of different sp(n)");
  const GaussianRational t = (to_matrix(x) * to_matrix(y)).trace();
  if (t.im.numerator() != 0) throw std::logic_error("Trace(XY) is not real for sp(n) arguments");
  return -t.re;
}

double inner_product_b(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionMismatch("B of matrices of different size");
  const std::complex<double> t = (x * y).trace();
  const double scale = std::max(1.0, std::abs(t));
  if (std::abs(t.imag()) > 1e-12 * scale) throw std::logic_error("Trace(XY) has a non-negligible imaginary part");
  return -t.real();
}

}  // namespace spgo
