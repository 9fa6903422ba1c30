// spgo: structure constants, decompositions and geodesic-orbit checks for
// Sp(n)/Sp(n_1) x ... x Sp(n_s).
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "spgo/report.hpp"

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<int> n;
  std::optional<std::string> partition;
  std::vector<std::string> metrics;
  std::optional<double> pass_tol, fail_tol, rank_tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> commutant_samples;
  std::vector<double> grid;
  std::optional<std::size_t> budget;
  std::optional<std::string> out;
  std::optional<std::string> export_path;
  std::optional<std::string> mode;
  bool timings = false;
};

// defaults < environment < config file < flags
spgo::RunConfig resolve(const Flags& f) {
  spgo::RunConfig c;
  spgo::apply_env(c, [](const char* name) { return std::getenv(name); });
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw spgo::ConfigError("cannot read config file " + *f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw spgo::ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    spgo::apply_json(c, j);
  }
  if (f.n) c.n = f.n;
  if (f.partition) c.partition = *f.partition;
  if (!f.metrics.empty()) c.metrics = f.metrics;
  if (f.pass_tol) c.tol.pass = *f.pass_tol;
  if (f.fail_tol) c.tol.fail = *f.fail_tol;
  if (f.rank_tol) c.tol.rank = *f.rank_tol;
  if (f.seed) c.seed = *f.seed;
  if (f.samples) {
    c.random_samples = *f.samples;
    c.commutant_samples = *f.samples;
  }
  if (f.commutant_samples) c.commutant_samples = *f.commutant_samples;
  if (!f.grid.empty()) c.grid = f.grid;
  if (f.budget) c.budget = *f.budget;
  if (f.out) c.out = *f.out;
  if (f.export_path) c.export_path = *f.export_path;
  if (f.mode) c.mode = spgo::parse_arithmetic_mode(*f.mode);
  if (f.timings) c.timings = true;
  return c;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--out", f.out, "write the JSON report here and a summary to stdout");
  cmd->add_option("--mode", f.mode, "arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--pass-tol", f.pass_tol, "residual below which a vector passes");
  cmd->add_option("--fail-tol", f.fail_tol, "residual above which a vector fails");
  cmd->add_option("--rank-tol", f.rank_tol, "relative singular value cutoff");
  cmd->add_flag("--timings", f.timings, "include wall-clock timings in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic orbit metrics on Sp(n)/Sp(n1) x ... x Sp(ns)"};
  app.set_version_flag("--version", spgo::kToolVersion);
  app.require_subcommand(1);

  Flags f;
  auto* verify = app.add_subcommand("verify-brackets", "check the structure constants of sp(n)");
  verify->add_option("--n", f.n, "rank n (1..6)");
  verify->add_option("--export", f.export_path, "write the structure-constant table as text");
  add_common(verify, f);

  auto* decompose = app.add_subcommand("decompose", "build and verify the reductive decomposition");
  decompose->add_option("--partition", f.partition, "n:n1+...+ns");
  add_common(decompose, f);

  auto* go = app.add_subcommand("go-check", "test metrics for the geodesic orbit property");
  go->add_option("--partition", f.partition, "n:n1+...+ns");
  go->add_option("--metric", f.metrics, "diag:LABEL=value,... or full:@path (repeatable)");
  go->add_option("--samples", f.samples, "random test vectors");
  add_common(go, f);

  auto* cls = app.add_subcommand("classify", "scan candidate metrics and summarise");
  cls->add_option("--partition", f.partition, "n:n1+...+ns");
  cls->add_option("--grid", f.grid, "per-module eigenvalue grid")->delimiter(',');
  cls->add_option("--samples", f.samples, "random vectors per g.o. check and commutant samples");
  cls->add_option("--commutant-samples", f.commutant_samples, "random commutant candidates");
  cls->add_option("--budget", f.budget, "maximum diagonal candidates");
  add_common(cls, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : spgo::kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    spgo::RunConfig c = resolve(f);
    if (f.config) c.base_dir = std::filesystem::path(*f.config).parent_path();

    auto start = std::chrono::steady_clock::now();
    spgo::CommandResult r;
    if (command == "verify-brackets") r = spgo::run_verify_brackets(c);
    else if (command == "decompose") r = spgo::run_decompose(c);
    else if (command == "go-check") r = spgo::run_go_check(c);
    else r = spgo::run_classify(c);
    std::optional<nlohmann::json> timings;
    if (c.timings) {
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      timings = nlohmann::json{{"total", ms}};
    }

    const std::string text = spgo::make_report(command, c, r, timings).dump(2) + "\n";
    if (c.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(c.out);
      if (!out) throw spgo::ConfigError("cannot write " + c.out);
      out << text;
      for (const auto& line : r.summary) std::cout << line << "\n";
      std::cout << "status: " << r.status << "\n";
    }
    return r.exit_code;
  } catch (const spgo::ConfigError& e) {
    std::cerr << "spgo: " << e.what() << "\n";
  } catch (const spgo::PartitionError& e) {
    std::cerr << "spgo: invalid partition: " << e.what() << "\n";
  } catch (const spgo::MetricError& e) {
    std::cerr << "spgo: invalid metric: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "spgo: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "spgo: internal error: " << e.what() << "\n";
    return spgo::kExitFailure;
  }
  return spgo::kExitUsage;
}
