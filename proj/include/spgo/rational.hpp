#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace spgo {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& q);

/// Complex number with exact rational parts. Matrix entries of sp(n)
/// elements with rational coordinates live in Q[i].
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = Rational{0}) : re(r), im(i) {}

  bool is_zero() const { return re.numerator() == 0 && im.numerator() == 0; }
  GaussianRational conj() const { return {re, -im}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

}  // namespace spgo
