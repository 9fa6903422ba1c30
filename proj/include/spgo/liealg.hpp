#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spgo/basis.hpp"
#include "spgo/rational.hpp"

namespace spgo {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a matrix fails the sp(n) membership test. Carries the
/// offending block ("X", "Y", "anti-Hermitian" ...) and its magnitude.
class MembershipError : public std::runtime_error {
 public:
  MembershipError(std::string block, double magnitude);
  const std::string& block() const { return block_; }
  double magnitude() const { return magnitude_; }

 private:
  std::string block_;
  double magnitude_;
};

/// Dense 2n x 2n matrix over Q[i].
class ExactMatrix {
 public:
  explicit ExactMatrix(int n);

  int n() const { return n_; }
  int size() const { return 2 * n_; }

  GaussianRational& operator()(int r, int c) { return data_[r * size() + c]; }
  const GaussianRational& operator()(int r, int c) const { return data_[r * size() + c]; }

  ExactMatrix operator*(const ExactMatrix& o) const;
  ExactMatrix operator-(const ExactMatrix& o) const;
  GaussianRational trace() const;
  bool is_zero() const;

  Eigen::MatrixXcd to_complex() const;

 private:
  int n_;
  std::vector<GaussianRational> data_;
};

/// An element of sp(n) with exact rational coordinates over the canonical
/// basis. Zero coefficients are never stored.
class Element {
 public:
  explicit Element(int n);
  static Element basis_vector(int n, const BasisVector& v);

  int n() const { return n_; }
  const std::map<BasisVector, Rational>& coords() const { return coords_; }
  Rational coefficient(const BasisVector& v) const;
  bool is_zero() const { return coords_.empty(); }

  void add_term(const BasisVector& v, const Rational& c);

  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(const Rational& c, const Element& x);
  friend bool operator==(const Element&, const Element&) = default;

  std::string to_string() const;  // "3*g_11 - 2*h_12", "0" for zero

 private:
  int n_;
  std::map<BasisVector, Rational> coords_;
};

enum class ArithmeticMode { Exact, Float };

std::string to_string(ArithmeticMode m);
ArithmeticMode parse_arithmetic_mode(const std::string& s);

struct BasisMatrix {
  BasisVector vector;
  ExactMatrix matrix;
};

/// The canonical basis with its matrices, n(2n+1) entries. Throws for n < 1.
std::vector<BasisMatrix> build_basis(int n);

ExactMatrix to_matrix(const Element& x);
Eigen::MatrixXcd to_complex_matrix(const Element& x);

/// Exact inverse of to_matrix. Throws MembershipError unless m is exactly in sp(n).
Element from_matrix(const ExactMatrix& m);

/// Float-mode membership check: anti-Hermitian, block form (X, -conj(Y); Y, conj(X))
/// with Y symmetric, each within tol per entry. Throws MembershipError.
void check_membership(const Eigen::MatrixXcd& m, double tol = 1e-10);

/// Float-mode coordinates in Basis order, coords(b) = B(m, b) / B(b, b).
Eigen::VectorXd from_complex_matrix(const Eigen::MatrixXcd& m, double tol = 1e-10);
Eigen::MatrixXcd to_complex_matrix(const Eigen::VectorXd& coords, const Basis& basis);

Element bracket(const Element& x, const Element& y);

/// B(X, Y) = -Trace(XY). The trace is real on sp(n); a nonzero imaginary
/// part is a logic error.
Rational inner_product_b(const Element& x, const Element& y);
double inner_product_b(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y);

}  // namespace spgo
