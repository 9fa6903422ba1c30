#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "spgo/rational.hpp"

namespace spgo {

inline constexpr double kDefaultRankTol = 1e-10;

/// Singular values below rel_tol * (largest singular value) count as zero.
std::size_t numerical_rank(const Eigen::MatrixXd& a, double rel_tol = kDefaultRankTol);

/// Orthonormal basis (as columns) of the null space of `a`.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double rel_tol = kDefaultRankTol);

/// Exact rank of a list of rational row vectors of equal length.
std::size_t exact_rank(std::vector<std::vector<Rational>> rows);

}  // namespace spgo
