#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spgo/decomposition.hpp"

namespace spgo {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// B-orthonormal coordinates on m: coordinate k is b_k * scale_factors[k]
/// for the basis vector b_k = basis[basis_indices[k]].
struct Chart {
  std::vector<std::size_t> basis_indices;
  std::vector<double> scale_factors;  // 1 / sqrt(B(b, b))
  std::vector<ModuleLabel> module_of;
};

Chart orthonormalize(const Decomposition& d);

struct DiagonalByModule {
  std::vector<std::pair<ModuleLabel, double>> eigenvalues;
};

struct FullOperator {
  Eigen::MatrixXd matrix;  // symmetric, in the coordinates of orthonormalize()
  std::string source;      // file it was read from, if any
};

struct MetricSpec {
  std::variant<DiagonalByModule, FullOperator> value;

  static MetricSpec standard() { return {DiagonalByModule{}}; }
  std::string to_string() const;
};

/// "diag:N=2.0,M01=1.0,M12=1.0" or "full:@path". Relative paths resolve
/// against `base_dir`. Modules left out of a diag spec get eigenvalue 1.
MetricSpec parse_metric_spec(std::string_view text, const std::filesystem::path& base_dir = {});

/// Whitespace-separated row-major square matrix.
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);

inline constexpr double kEquivarianceCap = 1e-6;

/// The metric endomorphism A on m in orthonormal coordinates.
struct MetricOperator {
  Eigen::MatrixXd matrix;
  double equivariance_residual = 0;  // max_a |[ad(a)|_m, A]| / |A|
  double min_eigenvalue = 0;
};

/// Expands and validates a spec: throws MetricError for unknown labels,
/// non-symmetric or non-positive-definite operators, and operators whose
/// equivariance residual exceeds kEquivarianceCap.
MetricOperator metric_operator(const MetricSpec& spec, const Decomposition& d);

/// Wraps an already assembled matrix, computing its residual and spectrum
/// without enforcing the caps.
MetricOperator make_operator(Eigen::MatrixXd matrix, const Decomposition& d);

/// max_a |rho(a) A - A rho(a)|_F / |A|_F over the h basis.
double equivariance_residual(const Eigen::MatrixXd& a, const Decomposition& d);

/// ad(u_a) restricted to m for each h basis vector, in orthonormal coordinates.
std::vector<Eigen::MatrixXd> isotropy_action(const Decomposition& d);

struct GeodesicSolution {
  Eigen::VectorXd a;   // minimum-norm minimizer, orthonormal coordinates of h
  double residual = 0; // |[a + X, AX]| / (|X| |AX|)
  std::size_t rank = 0;
};

/// Least-squares solve of min_a |[a + X, AX]|_B over a in h, with the
/// constraint taken in all of g. X is given in orthonormal m coordinates.
GeodesicSolution geodesic_solve(const MetricOperator& op, const Eigen::VectorXd& x, const Decomposition& d,
                                double rank_tol = kDefaultRankTol);

struct TestVector {
  std::string description;
  Eigen::VectorXd coords;  // orthonormal m coordinates
};

/// X = f_11 + e_12 + X_12 (X_12 the first unit vector of M12) when n0 = 1
/// and s > 1; otherwise the sum of the first unit vector of every module.
TestVector witness_vector(const Decomposition& d);

/// Structured and random test vectors in evaluation order: the witness,
/// every unit vector, every sum of unit vectors from distinct modules, the
/// module covers (one unit vector from each module, varied one at a time;
/// only with three or more modules), then `random_samples` seeded random
/// unit vectors.
std::vector<TestVector> go_test_set(const Decomposition& d, std::size_t random_samples, std::uint64_t seed);

struct GoCheckConfig {
  double pass_tol = 1e-8;
  double fail_tol = 1e-4;
  double rank_tol = kDefaultRankTol;
  std::size_t random_samples = 64;
  std::uint64_t seed = 42;
  /// Stop at the first residual above fail_tol; the verdict is unchanged.
  bool stop_on_fail = false;
};

enum class Outcome { Pass, Fail, Indeterminate };
std::string to_string(Outcome o);

struct ResidualRecord {
  std::string description;
  double residual = 0;
  std::size_t rank = 0;
};

struct GoVerdict {
  Outcome outcome = Outcome::Pass;
  std::vector<ResidualRecord> records;
  double max_residual = 0;
  std::string worst_vector;
  std::size_t vectors_tested = 0;
  double pass_tol = 0;
  double fail_tol = 0;
};

GoVerdict go_check(const MetricOperator& op, const Decomposition& d, const GoCheckConfig& config = {});

struct BiinvarianceReport {
  double leakage = 0;         // |P_p A P_N| / |A|
  bool maps_n_into_n = false;
  double mean_eigenvalue = 0; // of A restricted to N
  double deviation = 0;       // |A_N - mean Id|_F / |mean Id|_F
  bool scalar = false;
};

/// Checks that A preserves N and reports how far A|_N is from a multiple of
/// the identity. Throws std::invalid_argument when n0 = 0.
BiinvarianceReport biinvariance_restriction_check(const MetricOperator& op, const Decomposition& d,
                                                  double tol = 1e-8);

}  // namespace spgo
