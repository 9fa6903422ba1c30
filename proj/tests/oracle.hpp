// Reference implementations used only by the tests. They share no code with
// the library: basis matrices are placed by hand from the definitions,
// coordinates come from a dense least-squares solve, and the geodesic
// residual is computed on 2n x 2n complex matrices.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

struct Vec {
  char kind;  // 'e', 'f', 'g', 'h'
  int a, b;   // 1-based
  std::string name() const { return std::string(1, kind) + "_" + std::to_string(a) + std::to_string(b); }
};

inline int dim_sp(int n) { return n * (2 * n + 1); }

// Canonical order: (a, b) lexicographic, then e < f < g < h.
inline std::vector<Vec> basis(int n) {
  std::vector<Vec> out;
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b)
      for (char k : {'e', 'f', 'g', 'h'}) {
        if (k == 'e' && a == b) continue;
        out.push_back({k, a, b});
      }
  return out;
}

// E_ab, F_ab, G_ab, H_ab of the 2n x 2n embedding, 0-based internally.
inline Mat unit(char k, int n, int a, int b) {
  Mat m = Mat::Zero(2 * n, 2 * n);
  const int i = a - 1, j = b - 1;
  const cd I(0, 1);
  switch (k) {
    case 'e': m(i, j) = 1; m(n + i, n + j) = 1; break;
    case 'f': m(i, j) = I; m(n + i, n + j) = -I; break;
    case 'g': m(i, n + j) = -1; m(n + j, i) = 1; break;
    case 'h': m(i, n + j) = I; m(n + j, i) = I; break;
  }
  return m;
}

inline Mat matrix(const Vec& v, int n) {
  if (v.kind == 'e') return unit('e', n, v.a, v.b) - unit('e', n, v.b, v.a);
  return unit(v.kind, n, v.a, v.b) + unit(v.kind, n, v.b, v.a);
}

inline double killing(const Mat& x, const Mat& y) { return -(x * y).trace().real(); }

// Coordinates of an sp(n) matrix by least squares over the real span.
inline Eigen::VectorXd coords(const Mat& m, int n) {
  const auto bs = basis(n);
  const int N = 2 * n;
  Eigen::MatrixXd A(2 * N * N, bs.size());
  Eigen::VectorXd rhs(2 * N * N);
  for (std::size_t c = 0; c < bs.size(); ++c) {
    Mat b = matrix(bs[c], n);
    for (int k = 0; k < N * N; ++k) {
      A(k, c) = b.data()[k].real();
      A(N * N + k, c) = b.data()[k].imag();
    }
  }
  for (int k = 0; k < N * N; ++k) {
    rhs(k) = m.data()[k].real();
    rhs(N * N + k) = m.data()[k].imag();
  }
  return A.colPivHouseholderQr().solve(rhs);
}

inline Mat from_coords(const Eigen::VectorXd& x, int n) {
  const auto bs = basis(n);
  Mat m = Mat::Zero(2 * n, 2 * n);
  for (std::size_t c = 0; c < bs.size(); ++c) m += x(c) * matrix(bs[c], n);
  return m;
}

// Geodesic residual min_a |[a + X, A X]| / (|X| |AX|) where X and AX are
// given as matrices and h is spanned by the matrices in `h`.
inline double go_residual(const Mat& x, const Mat& ax, const std::vector<Mat>& h) {
  const Mat rhs = -(x * ax - ax * x);
  const int N = static_cast<int>(x.rows());
  Eigen::MatrixXd A(2 * N * N, h.size());
  Eigen::VectorXd b(2 * N * N);
  for (std::size_t c = 0; c < h.size(); ++c) {
    Mat col = h[c] * ax - ax * h[c];
    for (int k = 0; k < N * N; ++k) {
      A(k, c) = col.data()[k].real();
      A(N * N + k, c) = col.data()[k].imag();
    }
  }
  for (int k = 0; k < N * N; ++k) {
    b(k) = rhs.data()[k].real();
    b(N * N + k) = rhs.data()[k].imag();
  }
  Eigen::VectorXd sol = h.empty() ? Eigen::VectorXd() : Eigen::VectorXd(A.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b));
  Mat a = Mat::Zero(N, N);
  for (std::size_t c = 0; c < h.size(); ++c) a += sol(c) * h[c];
  const Mat r = (a + x) * ax - ax * (a + x);
  const double nx = std::sqrt(killing(x, x)), nax = std::sqrt(killing(ax, ax));
  return std::sqrt(std::max(0.0, killing(r, r))) / (nx * nax);
}

// Index ranges (1-based, inclusive) of the blocks of a partition.
struct Blocks {
  int n;
  std::vector<int> begin, end;  // block 0 = free block
  int of(int idx) const {
    for (std::size_t j = 0; j < begin.size(); ++j)
      if (idx >= begin[j] && idx <= end[j]) return static_cast<int>(j);
    return -1;
  }
};

inline Blocks blocks(int n, const std::vector<int>& parts) {
  Blocks b{n, {}, {}};
  int n0 = n;
  for (int p : parts) n0 -= p;
  b.begin.push_back(1);
  b.end.push_back(n0);
  int at = n0 + 1;
  for (int p : parts) {
    b.begin.push_back(at);
    b.end.push_back(at + p - 1);
    at += p;
  }
  return b;
}

// h = span of basis vectors with both indices in the same nonfree block.
inline std::vector<Mat> isotropy(int n, const std::vector<int>& parts) {
  const Blocks bl = blocks(n, parts);
  std::vector<Mat> out;
  for (const auto& v : basis(n)) {
    const int i = bl.of(v.a), j = bl.of(v.b);
    if (i == j && i > 0) out.push_back(matrix(v, n));
  }
  return out;
}

// The block pair (min, max) a basis vector belongs to.
inline std::pair<int, int> block_pair(const Vec& v, const Blocks& bl) {
  int i = bl.of(v.a), j = bl.of(v.b);
  if (i > j) std::swap(i, j);
  return {i, j};
}

}  // namespace oracle
