#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spgo/decomposition.hpp"
#include "spgo/metric.hpp"

namespace spgo {

/// Frobenius-orthonormal basis of the symmetric operators on m commuting
/// with ad(h)|_m, assembled block by block from intertwiners between modules.
struct CommutantBasis {
  std::vector<Eigen::MatrixXd> basis;
  std::size_t dim() const { return basis.size(); }
};

CommutantBasis commutant_basis(const Decomposition& d, double rank_tol = kDefaultRankTol);

enum class Summary { StandardOnly, OneParameterFamily, Violation };
std::string to_string(Summary s);

/// Sp(n)/Sp(n-1): the only case with g.o. metrics beyond the standard one.
bool is_family_case(const Partition& p);
Summary expected_summary(const Partition& p);

struct AllowedCheck {
  bool allowed = false;
  double homothety_deviation = 0;  // |A - mean Id| / |mean Id|
  std::optional<double> n_block_deviation;
};

/// Whether A is homothetic to the standard metric or, for Sp(n)/Sp(n-1),
/// to some g_mu (scalar on N and on p, no coupling).
AllowedCheck allowed_metric(const MetricOperator& op, const Decomposition& d, double tol = 1e-8);

struct Candidate {
  std::string description;
  Outcome outcome = Outcome::Pass;
  double max_residual = 0;
  std::string worst_vector;
  std::size_t vectors_tested = 0;
  AllowedCheck allowed;
};

struct ScanResult {
  std::string kind;  // "diagonal" or "commutant"
  std::string partition;
  std::vector<Candidate> candidates;
  Summary summary = Summary::StandardOnly;
  std::size_t commutant_dim = 0;
  std::size_t rejected = 0;
  std::vector<std::string> notes;
  std::vector<std::string> violations;
  std::optional<double> min_failing_residual;
  std::optional<double> max_passing_residual;
};

struct ScanConfig {
  GoCheckConfig go;
  std::size_t budget = 512;
};

/// Every per-module eigenvalue assignment from `grid` (deterministically
/// subsampled beyond the budget). Allowed candidates must pass, all others
/// must fail.
ScanResult scan_diagonal(const Decomposition& d, const std::vector<double>& grid, const ScanConfig& config = {});

/// The standard metric, then (when samples > 0) g_mu probes in the
/// Sp(n)/Sp(n-1) case and `samples` random SPD operators projected onto the
/// commutant.
ScanResult scan_commutant(const Decomposition& d, const CommutantBasis& commutant, std::size_t samples,
                          const ScanConfig& config = {});

/// Modules m_ij (0 <= i < j <= s) joined whenever [m_ij, m_jk] projects
/// nontrivially on m_ik; the three eigenvalues are then forced equal.
struct EigenvalueGraph {
  std::vector<ModuleLabel> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t components = 0;
  bool connected() const { return components <= 1; }
};

EigenvalueGraph eigenvalue_graph(const Decomposition& d);

struct ClassifyConfig {
  std::vector<double> grid{1.0, 2.0};
  std::size_t commutant_samples = 128;
  ScanConfig scan;
};

struct Classification {
  std::string partition;
  Summary expected = Summary::StandardOnly;
  Summary observed = Summary::StandardOnly;
  RelationsReport relations;
  NormalizerReport normalizer;
  ScanResult diagonal;
  ScanResult commutant;
  std::vector<std::string> violations;
  bool agrees() const { return violations.empty() && observed == expected; }
};

Classification classify(const Partition& p, const ClassifyConfig& config = {});

}  // namespace spgo
