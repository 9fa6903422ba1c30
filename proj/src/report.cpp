#include "spgo/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace spgo {

using nlohmann::json;

namespace {

const char* kConfigKeys[] = {"n",     "partition", "metrics", "tol",  "seed",   "random_samples", "commutant_samples",
                             "grid",  "budget",    "mode",    "timings", "export"};

double parse_env_double(const char* name, const char* value) {
  char* end = nullptr;
  double v = std::strtod(value, &end);
  if (end == value || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " is not a number: '" + value + "'");
  }
  return v;
}

void validate(const RunConfig& c) {
  if (!(c.tol.pass > 0) || !(c.tol.fail > 0) || !(c.tol.rank > 0)) throw ConfigError("tolerances must be positive");
  if (c.tol.pass > c.tol.fail) throw ConfigError("pass tolerance must not exceed fail tolerance");
  if (c.grid.empty()) throw ConfigError("eigenvalue grid is empty");
  for (double g : c.grid) {
    if (!(g > 0) || !std::isfinite(g)) throw ConfigError("grid values must be positive");
  }
  if (c.budget == 0) throw ConfigError("budget must be positive");
}

Partition require_partition(const RunConfig& c) {
  if (c.partition.empty()) throw ConfigError("--partition is required");
  return parse_partition(c.partition);
}

GoCheckConfig go_config(const RunConfig& c) {
  GoCheckConfig g;
  g.pass_tol = c.tol.pass;
  g.fail_tol = c.tol.fail;
  g.rank_tol = c.tol.rank;
  g.random_samples = c.random_samples;
  g.seed = c.seed;
  return g;
}

void round_tree(json& j) {
  if (j.is_number_float()) {
    j = round_sig(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) round_tree(v);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string coords_string(const Eigen::VectorXd& v, const Basis& basis) {
  std::ostringstream os;
  bool first = true;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 1e-12) continue;
    if (!first) os << " + ";
    os << round_sig(v[i], 6) << "*" << basis[static_cast<std::size_t>(i)].name();
    first = false;
  }
  return first ? "0" : os.str();
}

// A row slice Msub j l compared with its own aggregate M 0 j.
bool slice_of(const ModuleLabel& part, const ModuleLabel& whole) {
  return part.type == ModuleLabel::Type::Msub && whole.type == ModuleLabel::Type::M && whole.i == 0 &&
         whole.j == part.j;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

double round_sig(double v, int digits) {
  if (v == 0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

json to_json(const RunConfig& c) {
  json j;
  j["n"] = c.n ? json(*c.n) : json(nullptr);
  j["partition"] = c.partition;
  j["metrics"] = c.metrics;
  j["tol"] = {{"pass", c.tol.pass}, {"fail", c.tol.fail}, {"rank", c.tol.rank}};
  j["seed"] = c.seed;
  j["random_samples"] = c.random_samples;
  j["commutant_samples"] = c.commutant_samples;
  j["grid"] = c.grid;
  j["budget"] = c.budget;
  j["mode"] = to_string(c.mode);
  j["timings"] = c.timings;
  j["export"] = c.export_path;
  return j;
}

void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
      if (key == "n") {
        c.n = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
      } else if (key == "partition") {
        c.partition = value.get<std::string>();
      } else if (key == "metrics") {
        c.metrics = value.get<std::vector<std::string>>();
      } else if (key == "tol") {
        for (const auto& [tk, tv] : value.items()) {
          if (tk == "pass") c.tol.pass = tv.get<double>();
          else if (tk == "fail") c.tol.fail = tv.get<double>();
          else if (tk == "rank") c.tol.rank = tv.get<double>();
          else throw ConfigError("unknown tolerance '" + tk + "'");
        }
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "random_samples") {
        c.random_samples = value.get<std::size_t>();
      } else if (key == "commutant_samples") {
        c.commutant_samples = value.get<std::size_t>();
      } else if (key == "grid") {
        c.grid = value.get<std::vector<double>>();
      } else if (key == "budget") {
        c.budget = value.get<std::size_t>();
      } else if (key == "mode") {
        c.mode = parse_arithmetic_mode(value.get<std::string>());
      } else if (key == "timings") {
        c.timings = value.get<bool>();
      } else if (key == "export") {
        c.export_path = value.get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void apply_env(RunConfig& c, const std::function<const char*(const char*)>& getenv_fn) {
  if (const char* v = getenv_fn("SPGO_TOL_PASS")) c.tol.pass = parse_env_double("SPGO_TOL_PASS", v);
  if (const char* v = getenv_fn("SPGO_TOL_FAIL")) c.tol.fail = parse_env_double("SPGO_TOL_FAIL", v);
}

json to_json(const BracketLemmaReport& r) {
  json mismatches = json::array();
  for (const auto& m : r.mismatches) {
    mismatches.push_back({{"x", m.x.to_string()}, {"y", m.y.to_string()}, {"commutator", m.commutator},
                          {"formula", m.formula}});
  }
  return {{"n", r.n},
          {"pairs_checked", r.pairs_checked},
          {"mismatch_count", r.mismatches.size()},
          {"mismatches", mismatches},
          {"printed_rows_mismatches", r.printed_rows_mismatches},
          {"ok", r.ok()}};
}

json to_json(const TableIdentityReport& r) {
  return {{"antisymmetry_violations", r.antisymmetry_violations},
          {"jacobi_triples", r.jacobi_triples},
          {"jacobi_violations", r.jacobi_violations},
          {"orthogonality_violations", r.orthogonality_violations},
          {"invariance_triples", r.invariance_triples},
          {"invariance_violations", r.invariance_violations},
          {"ok", r.ok()}};
}

json to_json(const RelationsReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"pairs_checked", c.pairs_checked}, {"violations", c.violations},
                      {"ok", c.ok()}});
  }
  return {{"ok", r.ok()}, {"violation_count", r.violation_count()}, {"checks", checks}};
}

json to_json(const NormalizerReport& r) {
  return {{"computed_dim", r.computed_dim},
          {"expected_dim", r.expected_dim},
          {"span_match", r.span_match},
          {"ok", r.ok()}};
}

json to_json(const EquivalenceResult& r) {
  json j = {{"first", r.first.to_string()},
            {"second", r.second.to_string()},
            {"equivalent", r.equivalent},
            {"intertwiner_dim", r.intertwiner_dim}};
  if (r.witness) {
    j["witness"] = {{"dominant_factor", r.witness->dominant_factor},
                    {"factor_norms", r.witness->factor_norms},
                    {"bracket_x_norm", r.witness->bracket_x_norm},
                    {"bracket_y_norm", r.witness->bracket_y_norm}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const EigenvalueGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back(n.to_string());
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({g.nodes[a].to_string(), g.nodes[b].to_string()});
  return {{"nodes", nodes}, {"edges", edges}, {"components", g.components}, {"connected", g.connected()}};
}

json to_json(const GoVerdict& v, bool include_records) {
  json j = {{"outcome", to_string(v.outcome)},
            {"max_residual", v.max_residual},
            {"worst_vector", v.worst_vector},
            {"vectors_tested", v.vectors_tested},
            {"pass_tol", v.pass_tol},
            {"fail_tol", v.fail_tol}};
  if (include_records) {
    json records = json::array();
    for (const auto& r : v.records) {
      records.push_back({{"vector", r.description}, {"residual", r.residual}, {"rank", r.rank}});
    }
    j["records"] = records;
  }
  return j;
}

json to_json(const BiinvarianceReport& r) {
  return {{"leakage", r.leakage},
          {"maps_n_into_n", r.maps_n_into_n},
          {"mean_eigenvalue", r.mean_eigenvalue},
          {"deviation", r.deviation},
          {"scalar", r.scalar}};
}

json to_json(const ScanResult& s) {
  json candidates = json::array();
  for (const auto& c : s.candidates) {
    candidates.push_back({{"description", c.description},
                          {"outcome", to_string(c.outcome)},
                          {"max_residual", c.max_residual},
                          {"worst_vector", c.worst_vector},
                          {"vectors_tested", c.vectors_tested},
                          {"allowed", c.allowed.allowed},
                          {"homothety_deviation", c.allowed.homothety_deviation},
                          {"n_block_deviation", optional_number(c.allowed.n_block_deviation)}});
  }
  return {{"kind", s.kind},
          {"partition", s.partition},
          {"summary", to_string(s.summary)},
          {"commutant_dim", s.commutant_dim},
          {"rejected", s.rejected},
          {"candidate_count", s.candidates.size()},
          {"candidates", candidates},
          {"notes", s.notes},
          {"violations", s.violations},
          {"min_failing_residual", optional_number(s.min_failing_residual)},
          {"max_passing_residual", optional_number(s.max_passing_residual)}};
}

json to_json(const Classification& c) {
  return {{"partition", c.partition},
          {"expected", to_string(c.expected)},
          {"observed", to_string(c.observed)},
          {"agrees", c.agrees()},
          {"relations", to_json(c.relations)},
          {"normalizer", to_json(c.normalizer)},
          {"diagonal", to_json(c.diagonal)},
          {"commutant", to_json(c.commutant)},
          {"violations", c.violations}};
}

BracketLemmaReport verify_bracket_lemma_float(int n, double tol) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  Basis basis(n);
  const std::size_t dim = basis.size();
  std::vector<Eigen::MatrixXcd> mats;
  mats.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) mats.push_back(to_complex_matrix(Element::basis_vector(n, basis[i])));

  BracketLemmaReport report;
  report.n = n;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Eigen::VectorXd got = from_complex_matrix(mats[i] * mats[j] - mats[j] * mats[i]);
      Eigen::VectorXd want = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
      for (const auto& [v, c] : delta_formula_bracket(basis[i], basis[j])) {
        want[static_cast<Eigen::Index>(basis.at(v))] += static_cast<double>(c);
      }
      ++report.pairs_checked;
      if ((got - want).cwiseAbs().maxCoeff() > tol) {
        report.mismatches.push_back({basis[i], basis[j], coords_string(got, basis), coords_string(want, basis)});
      }
      Eigen::VectorXd printed = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
      for (const auto& [v, c] : delta_formula_bracket(basis[i], basis[j], FormulaRows::Printed)) {
        printed[static_cast<Eigen::Index>(basis.at(v))] += static_cast<double>(c);
      }
      if ((got - printed).cwiseAbs().maxCoeff() > tol) ++report.printed_rows_mismatches;
    }
  }
  return report;
}

CommandResult run_verify_brackets(const RunConfig& c) {
  validate(c);
  if (!c.n) throw ConfigError("--n is required");
  const int n = *c.n;
  if (n < 1 || n > kDefaultMaxTableN) {
    throw ConfigError("n must lie in 1.." + std::to_string(kDefaultMaxTableN) + ", got " + std::to_string(n));
  }
  StructureTable table = build_table(n);
  BracketLemmaReport lemma =
      c.mode == ArithmeticMode::Exact ? verify_bracket_lemma(table) : verify_bracket_lemma_float(n);
  TableIdentityReport ids = verify_table_identities(table);

  if (!c.export_path.empty()) {
    std::ofstream out(c.export_path);
    if (!out) throw ConfigError("cannot write export file " + c.export_path);
    out << table.to_text();
  }

  CommandResult r;
  r.results = {{"n", n},
               {"mode", to_string(c.mode)},
               {"basis_size", table.dim()},
               {"bracket_formula", to_json(lemma)},
               {"identities", to_json(ids)}};
  const bool ok = lemma.ok() && ids.ok();
  r.exit_code = ok ? kExitOk : kExitFailure;
  r.status = ok ? "pass" : "fail";
  r.summary.push_back("sp(" + std::to_string(n) + "), dim " + std::to_string(table.dim()) + ", " +
                      to_string(c.mode) + " arithmetic");
  r.summary.push_back("bracket formula: " + std::to_string(lemma.pairs_checked) + " pairs, " +
                      std::to_string(lemma.mismatches.size()) + " mismatches");
  r.summary.push_back("identities: " + std::string(ids.ok() ? "ok" : "VIOLATED") + " (" +
                      std::to_string(ids.jacobi_triples) + " Jacobi triples)");
  return r;
}

CommandResult run_decompose(const RunConfig& c) {
  validate(c);
  Partition p = require_partition(c);
  Decomposition d = build_decomposition(p);

  json factors = json::array();
  for (const auto& f : d.h_factors()) factors.push_back({{"label", f.label.to_string()}, {"dim", f.dim()}});

  json modules = json::array();
  for (const auto& m : d.modules()) {
    json names = json::array();
    for (auto idx : m.indices) names.push_back(d.basis()[idx].name());
    modules.push_back({{"label", m.label.to_string()}, {"dim", m.dim()}, {"basis", names}});
  }
  json aggregates = json::array();
  for (int j = 1; j <= p.s() && p.n0() > 0; ++j) {
    auto agg = d.find(ModuleLabel::m(0, j));
    if (agg) aggregates.push_back({{"label", agg->label.to_string()}, {"dim", agg->dim()}});
  }

  RelationsReport relations = verify_bracket_relations(d);
  NormalizerReport normalizer = normalizer_check(d, c.tol.rank);

  json equivalences = json::array();
  const auto labels = equivalence_labels(d);
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = a + 1; b < labels.size(); ++b) {
      if (slice_of(labels[a], labels[b]) || slice_of(labels[b], labels[a])) continue;
      equivalences.push_back(to_json(module_equivalence(d, labels[a], labels[b], c.seed, c.tol.rank)));
    }
  }

  const std::size_t dim_g = d.basis().size();
  const bool dims_ok = d.dim_m() == Decomposition::expected_dim_m(p) && d.dim_h() + d.dim_m() == dim_g;

  CommandResult r;
  r.results = {{"partition", p.to_string()},
               {"n", p.n()},
               {"n0", p.n0()},
               {"s", p.s()},
               {"dim_g", dim_g},
               {"dim_h", d.dim_h()},
               {"dim_m", d.dim_m()},
               {"expected_dim_m", Decomposition::expected_dim_m(p)},
               {"h_factors", factors},
               {"modules", modules},
               {"aggregates", aggregates},
               {"relations", to_json(relations)},
               {"normalizer", to_json(normalizer)},
               {"equivalences", equivalences},
               {"eigenvalue_graph", to_json(eigenvalue_graph(d))}};
  const bool ok = dims_ok && relations.ok() && normalizer.ok();
  r.exit_code = ok ? kExitOk : kExitFailure;
  r.status = ok ? "pass" : "fail";

  std::ostringstream dims;
  for (const auto& m : d.modules()) dims << " " << m.label.to_string() << ":" << m.dim();
  r.summary.push_back("Sp(" + std::to_string(p.n()) + ") partition " + p.to_string() + ": dim h " +
                      std::to_string(d.dim_h()) + ", dim m " + std::to_string(d.dim_m()));
  r.summary.push_back("modules" + dims.str());
  r.summary.push_back("bracket relations: " + std::string(relations.ok() ? "ok" : "VIOLATED") +
                      ", normalizer dim " + std::to_string(normalizer.computed_dim) + " (expected " +
                      std::to_string(normalizer.expected_dim) + ")");
  return r;
}

CommandResult run_go_check(const RunConfig& c) {
  validate(c);
  Partition p = require_partition(c);
  std::vector<std::string> texts = c.metrics;
  if (texts.empty()) texts.push_back(MetricSpec::standard().to_string());

  Decomposition d = build_decomposition(p);
  // Parse and expand every spec before running anything so that a bad spec
  // is reported without partial output.
  std::vector<std::pair<MetricSpec, MetricOperator>> ops;
  for (const auto& t : texts) {
    MetricSpec spec = parse_metric_spec(t, c.base_dir);
    MetricOperator op = metric_operator(spec, d);
    ops.emplace_back(std::move(spec), std::move(op));
  }

  const GoCheckConfig go = go_config(c);
  json metrics = json::array();
  bool any_fail = false, any_indeterminate = false;
  CommandResult r;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& [spec, op] = ops[k];
    GoVerdict v = go_check(op, d, go);
    any_fail |= v.outcome == Outcome::Fail;
    any_indeterminate |= v.outcome == Outcome::Indeterminate;
    json entry = {{"spec", texts[k]},
                  {"canonical", spec.to_string()},
                  {"operator",
                   {{"dim", op.matrix.rows()},
                    {"min_eigenvalue", op.min_eigenvalue},
                    {"equivariance_residual", op.equivariance_residual}}},
                  {"verdict", to_json(v, true)}};
    entry["biinvariance"] = p.n0() > 0 ? to_json(biinvariance_restriction_check(op, d)) : json(nullptr);
    metrics.push_back(entry);
    r.summary.push_back(texts[k] + ": " + to_string(v.outcome) + ", max residual " + fmt(v.max_residual) +
                        " over " + std::to_string(v.vectors_tested) + " vectors");
  }
  r.results = {{"partition", p.to_string()}, {"dim_m", d.dim_m()}, {"metrics", metrics}};
  if (any_fail) {
    r.exit_code = kExitFailure;
    r.status = "fail";
  } else if (any_indeterminate) {
    r.exit_code = kExitIndeterminate;
    r.status = "indeterminate";
  } else {
    r.exit_code = kExitOk;
    r.status = "pass";
  }
  return r;
}

CommandResult run_classify(const RunConfig& c) {
  validate(c);
  Partition p = require_partition(c);
  ClassifyConfig cfg;
  cfg.grid = c.grid;
  cfg.commutant_samples = c.commutant_samples;
  cfg.scan.go = go_config(c);
  cfg.scan.budget = c.budget;
  Classification cls = classify(p, cfg);

  CommandResult r;
  r.results = to_json(cls);
  r.exit_code = cls.agrees() ? kExitOk : kExitFailure;
  r.status = cls.agrees() ? "pass" : "fail";
  r.summary.push_back("partition " + cls.partition + ": expected " + to_string(cls.expected) + ", observed " +
                      to_string(cls.observed));
  for (const ScanResult* s : {&cls.diagonal, &cls.commutant}) {
    std::size_t passing = 0;
    for (const auto& cand : s->candidates) passing += cand.outcome == Outcome::Pass;
    r.summary.push_back(s->kind + " scan: " + std::to_string(s->candidates.size()) + " candidates, " +
                        std::to_string(passing) + " g.o., summary " + to_string(s->summary));
  }
  for (const auto& v : cls.violations) r.summary.push_back("violation: " + v);
  return r;
}

json make_report(const std::string& command, const RunConfig& c, const CommandResult& r,
                 const std::optional<json>& timings) {
  json j = {{"schema_version", kSchemaVersion},
            {"tool", {{"name", "spgo"}, {"version", kToolVersion}}},
            {"command", command},
            {"config", to_json(c)},
            {"results", r.results},
            {"verdict", {{"status", r.status}, {"exit_code", r.exit_code}}}};
  if (timings) j["timings_ms"] = *timings;
  round_tree(j);
  return j;
}

}  // namespace spgo
