#include "spgo/linalg.hpp"

#include <utility>

namespace spgo {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> full_svd(const Eigen::MatrixXd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a, Eigen::ComputeFullV);
}

std::size_t rank_from(const Eigen::VectorXd& sv, double rel_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

}  // namespace

std::size_t numerical_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  return rank_from(Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues(), rel_tol);
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double rel_tol) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0 || cols == 0) return Eigen::MatrixXd::Identity(cols, cols);
  const auto svd = full_svd(a);
  const auto r = static_cast<Eigen::Index>(rank_from(svd.singularValues(), rel_tol));
  return svd.matrixV().rightCols(cols - r);
}

std::size_t exact_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c].numerator() == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c].numerator() == 0) continue;
      const Rational f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace spgo
