#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spgo/classifier.hpp"
#include "spgo/decomposition.hpp"
#include "spgo/liealg.hpp"
#include "spgo/metric.hpp"
#include "spgo/structure.hpp"

namespace spgo {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1.0.0";

/// Process exit codes; part of the command-line contract.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitIndeterminate = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Tolerances {
  double pass = 1e-8;
  double fail = 1e-4;
  double rank = kDefaultRankTol;
};

struct RunConfig {
  std::optional<int> n;
  std::string partition;
  std::vector<std::string> metrics;
  Tolerances tol;
  std::uint64_t seed = 42;
  std::size_t random_samples = 64;
  std::size_t commutant_samples = 128;
  std::vector<double> grid{1.0, 2.0};
  std::size_t budget = 512;
  std::string out;
  std::string export_path;
  ArithmeticMode mode = ArithmeticMode::Exact;
  bool timings = false;
  /// Directory that relative `full:@path` metric files resolve against.
  std::filesystem::path base_dir;
};

nlohmann::json to_json(const RunConfig& c);
/// Overlays the keys present in `j`; unknown keys are rejected.
void apply_json(RunConfig& c, const nlohmann::json& j);
/// Overlays SPGO_TOL_PASS / SPGO_TOL_FAIL from the given lookup.
void apply_env(RunConfig& c, const std::function<const char*(const char*)>& getenv_fn);

/// Rounds to 12 significant digits so printed reports are stable.
double round_sig(double v, int digits = 12);

nlohmann::json to_json(const BracketLemmaReport& r);
nlohmann::json to_json(const TableIdentityReport& r);
nlohmann::json to_json(const RelationsReport& r);
nlohmann::json to_json(const NormalizerReport& r);
nlohmann::json to_json(const EquivalenceResult& r);
nlohmann::json to_json(const EigenvalueGraph& g);
nlohmann::json to_json(const GoVerdict& v, bool include_records);
nlohmann::json to_json(const BiinvarianceReport& r);
nlohmann::json to_json(const ScanResult& s);
nlohmann::json to_json(const Classification& c);

struct CommandResult {
  nlohmann::json results;
  int exit_code = kExitOk;
  std::string status;                // "pass", "fail", "indeterminate"
  std::vector<std::string> summary;  // human-readable lines
};

/// Each runner validates its inputs (throwing ConfigError, PartitionError or
/// MetricError for exit code 2) and returns the command's result block.
CommandResult run_verify_brackets(const RunConfig& c);
CommandResult run_decompose(const RunConfig& c);
CommandResult run_go_check(const RunConfig& c);
CommandResult run_classify(const RunConfig& c);

/// Float-mode counterpart of verify_bracket_lemma: commutators of complex
/// basis matrices, projected with from_complex_matrix.
BracketLemmaReport verify_bracket_lemma_float(int n, double tol = 1e-12);

/// Complete report document for a command.
nlohmann::json make_report(const std::string& command, const RunConfig& c, const CommandResult& r,
                           const std::optional<nlohmann::json>& timings = std::nullopt);

}  // namespace spgo
