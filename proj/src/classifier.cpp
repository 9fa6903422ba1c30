#include "spgo/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "spgo/rng.hpp"

namespace spgo {

namespace {

struct ModuleBlock {
  Eigen::Index offset;
  Eigen::Index dim;
  std::vector<Eigen::MatrixXd> rho;  // ad(u_a) restricted, one per h basis vector
  bool trivial;
};

std::vector<ModuleBlock> module_blocks(const Decomposition& d) {
  std::vector<ModuleBlock> out;
  Eigen::Index offset = 0;
  for (const auto& m : d.modules()) {
    ModuleBlock b{offset, static_cast<Eigen::Index>(m.dim()), {}, true};
    for (auto a : d.h_indices()) {
      b.rho.push_back(restricted_ad(d, a, m));
      if (b.rho.back().norm() > 0.0) b.trivial = false;
    }
    offset += b.dim;
    out.push_back(std::move(b));
  }
  return out;
}

// Intertwiners phi: P -> Q (dq x dp, column-major), optionally symmetric.
Eigen::MatrixXd intertwiners(const ModuleBlock& p, const ModuleBlock& q, bool symmetric, double rank_tol) {
  const Eigen::Index dp = p.dim, dq = q.dim, unknowns = dp * dq;
  if (p.trivial && q.trivial && !symmetric) return Eigen::MatrixXd::Identity(unknowns, unknowns);
  std::vector<Eigen::MatrixXd> rows;
  if (!(p.trivial && q.trivial))
    for (std::size_t a = 0; a < p.rho.size(); ++a)
      rows.push_back(Eigen::MatrixXd(Eigen::kroneckerProduct(p.rho[a].transpose(), Eigen::MatrixXd::Identity(dq, dq))) -
                     Eigen::MatrixXd(Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(dp, dp), q.rho[a])));
  if (symmetric) {
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(dp * (dp - 1) / 2, unknowns);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < dp; ++i)
      for (Eigen::Index j = i + 1; j < dp; ++j, ++r) {
        sym(r, j * dq + i) = 1.0;  // phi(i, j)
        sym(r, i * dq + j) = -1.0; // phi(j, i)
      }
    rows.push_back(std::move(sym));
  }
  Eigen::Index total = 0;
  for (const auto& m : rows) total += m.rows();
  Eigen::MatrixXd stacked(total, unknowns);
  Eigen::Index at = 0;
  for (const auto& m : rows) {
    stacked.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return nullspace(stacked, rank_tol);
}

}  // namespace

CommutantBasis commutant_basis(const Decomposition& d, double rank_tol) {
  CommutantBasis out;
  const auto dim = static_cast<Eigen::Index>(d.dim_m());
  const auto blocks = module_blocks(d);
  for (std::size_t p = 0; p < blocks.size(); ++p)
    for (std::size_t q = p; q < blocks.size(); ++q) {
      const auto& bp = blocks[p];
      const auto& bq = blocks[q];
      const Eigen::MatrixXd k = intertwiners(bp, bq, p == q, rank_tol);
      for (Eigen::Index c = 0; c < k.cols(); ++c) {
        const Eigen::Map<const Eigen::MatrixXd> phi(k.col(c).data(), bq.dim, bp.dim);
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
        if (p == q) {
          s.block(bp.offset, bp.offset, bp.dim, bp.dim) = phi;
        } else {
          s.block(bq.offset, bp.offset, bq.dim, bp.dim) = phi / std::sqrt(2.0);
          s.block(bp.offset, bq.offset, bp.dim, bq.dim) = phi.transpose() / std::sqrt(2.0);
        }
        out.basis.push_back(std::move(s));
      }
    }
  return out;
}

std::string to_string(Summary s) {
  switch (s) {
    case Summary::StandardOnly: return "standard-only";
    case Summary::OneParameterFamily: return "one-parameter-family";
    case Summary::Violation: return "violation";
  }
  return "?";
}

bool is_family_case(const Partition& p) { return p.s() == 1 && p.n0() == 1; }

Summary expected_summary(const Partition& p) {
  return is_family_case(p) ? Summary::OneParameterFamily : Summary::StandardOnly;
}

AllowedCheck allowed_metric(const MetricOperator& op, const Decomposition& d, double tol) {
  AllowedCheck r;
  const Eigen::MatrixXd& a = op.matrix;
  const Eigen::Index dim = a.rows();
  if (dim == 0) {
    r.allowed = true;
    return r;
  }
  const double mean = a.trace() / static_cast<double>(dim);
  r.homothety_deviation = (a - mean * Eigen::MatrixXd::Identity(dim, dim)).norm() / (mean * std::sqrt(static_cast<double>(dim)));
  bool allowed = r.homothety_deviation < tol;
  if (d.partition().n0() >= 1) {
    const auto b = biinvariance_restriction_check(op, d, tol);
    r.n_block_deviation = b.deviation;
    if (!allowed && is_family_case(d.partition())) {
      const Eigen::Index dn = static_cast<Eigen::Index>(d.find(ModuleLabel::n_block())->dim());
      const Eigen::MatrixXd ap = a.bottomRightCorner(dim - dn, dim - dn);
      const double mp = ap.trace() / static_cast<double>(dim - dn);
      const double p_dev = (ap - mp * Eigen::MatrixXd::Identity(dim - dn, dim - dn)).norm() /
                           (mp * std::sqrt(static_cast<double>(dim - dn)));
      allowed = b.maps_n_into_n && b.scalar && p_dev < tol;
    }
  }
  r.allowed = allowed;
  return r;
}

namespace {

void record(ScanResult& scan, Candidate c) {
  if (c.allowed.allowed && c.outcome != Outcome::Pass)
    scan.violations.push_back(c.description + ": expected g.o. but verdict " + to_string(c.outcome) +
                              " (max residual " + std::to_string(c.max_residual) + " at " + c.worst_vector + ")");
  if (!c.allowed.allowed && c.outcome != Outcome::Fail)
    scan.violations.push_back(c.description + ": expected non-g.o. but verdict " + to_string(c.outcome) +
                              " (max residual " + std::to_string(c.max_residual) + ")");
  if (c.outcome == Outcome::Fail)
    scan.min_failing_residual = std::min(scan.min_failing_residual.value_or(c.max_residual), c.max_residual);
  if (c.outcome == Outcome::Pass)
    scan.max_passing_residual = std::max(scan.max_passing_residual.value_or(0.0), c.max_residual);
  scan.candidates.push_back(std::move(c));
}

Candidate evaluate(std::string description, const MetricOperator& op, const Decomposition& d, const ScanConfig& config) {
  GoCheckConfig go = config.go;
  go.stop_on_fail = true;
  const GoVerdict v = go_check(op, d, go);
  Candidate c;
  c.description = std::move(description);
  c.outcome = v.outcome;
  c.max_residual = v.max_residual;
  c.worst_vector = v.worst_vector;
  c.vectors_tested = v.vectors_tested;
  c.allowed = allowed_metric(op, d);
  return c;
}

void summarize(ScanResult& scan) {
  if (!scan.violations.empty()) {
    scan.summary = Summary::Violation;
    return;
  }
  const bool beyond_standard = std::any_of(scan.candidates.begin(), scan.candidates.end(), [](const Candidate& c) {
    return c.outcome == Outcome::Pass && !(c.allowed.homothety_deviation < 1e-8);
  });
  scan.summary = beyond_standard ? Summary::OneParameterFamily : Summary::StandardOnly;
}

}  // namespace

ScanResult scan_diagonal(const Decomposition& d, const std::vector<double>& grid, const ScanConfig& config) {
  if (grid.empty()) throw std::invalid_argument("diagonal scan needs a nonempty grid");
  for (double g : grid)
    if (!(g > 0)) throw std::invalid_argument("grid values must be positive");
  ScanResult scan;
  scan.kind = "diagonal";
  scan.partition = d.partition().to_string();
  const auto& modules = d.modules();
  const std::size_t k = modules.size();
  const std::size_t g = grid.size();

  // Candidate index = base-|grid| digits, one per module.
  double total_d = std::pow(static_cast<double>(g), static_cast<double>(k));
  std::vector<std::uint64_t> chosen;
  if (total_d <= static_cast<double>(config.budget)) {
    const auto total = static_cast<std::uint64_t>(std::llround(total_d));
    chosen.resize(total);
    std::iota(chosen.begin(), chosen.end(), 0);
  } else {
    const auto total = static_cast<std::uint64_t>(total_d);
    std::set<std::uint64_t> picked;
    for (std::size_t c = 0; c < g; ++c) {  // constant assignments always included
      std::uint64_t idx = 0;
      for (std::size_t m = 0; m < k; ++m) idx = idx * g + c;
      picked.insert(idx);
    }
    auto rng = stream_rng(config.go.seed, Stream::Subsampling);
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    while (picked.size() < config.budget) picked.insert(pick(rng));
    chosen.assign(picked.begin(), picked.end());
    scan.notes.push_back("budget exceeded: " + std::to_string(chosen.size()) + " of " + std::to_string(total) +
                         " candidates, subsampled with seed " + std::to_string(config.go.seed));
  }

  for (std::uint64_t idx : chosen) {
    DiagonalByModule spec;
    std::uint64_t rest = idx;
    std::vector<double> values(k);
    for (std::size_t m = k; m-- > 0;) {
      values[m] = grid[rest % g];
      rest /= g;
    }
    for (std::size_t m = 0; m < k; ++m) spec.eigenvalues.emplace_back(modules[m].label, values[m]);
    const MetricSpec ms{spec};
    record(scan, evaluate(ms.to_string(), metric_operator(ms, d), d, config));
  }
  summarize(scan);
  return scan;
}

ScanResult scan_commutant(const Decomposition& d, const CommutantBasis& commutant, std::size_t samples,
                          const ScanConfig& config) {
  ScanResult scan;
  scan.kind = "commutant";
  scan.partition = d.partition().to_string();
  scan.commutant_dim = commutant.dim();
  const auto dim = static_cast<Eigen::Index>(d.dim_m());

  record(scan, evaluate("standard", metric_operator(MetricSpec::standard(), d), d, config));
  if (samples > 0 && is_family_case(d.partition()))
    for (double mu : {0.5, 2.0}) {
      const MetricSpec g_mu{DiagonalByModule{{{ModuleLabel::n_block(), mu}}}};
      record(scan, evaluate("g_mu mu=" + std::to_string(mu).substr(0, 3), metric_operator(g_mu, d), d, config));
    }

  if (dim > 0 && commutant.dim() > 0) {
    std::normal_distribution<double> normal;
    std::size_t shifted = 0;
    for (std::size_t k = 0; k < samples; ++k) {
      auto rng = stream_rng(config.go.seed, Stream::CommutantSamples, k);
      Eigen::MatrixXd gauss(dim, dim);
      for (Eigen::Index i = 0; i < gauss.size(); ++i) gauss.data()[i] = normal(rng);
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
      Eigen::VectorXd t(dim);
      for (Eigen::Index i = 0; i < dim; ++i) t(i) = std::exp(normal(rng));
      const Eigen::MatrixXd raw = q * t.asDiagonal() * q.transpose();

      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
      for (const auto& s : commutant.basis) a += (raw.cwiseProduct(s)).sum() * s;
      a = 0.5 * (a + a.transpose());
      const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (lmin <= 0) {
        a += (std::abs(lmin) + 0.01) * Eigen::MatrixXd::Identity(dim, dim);
        ++shifted;
      }
      MetricOperator op = make_operator(std::move(a), d);
      if (!(op.min_eigenvalue > 0) || op.equivariance_residual > kEquivarianceCap) {
        ++scan.rejected;
        continue;
      }
      record(scan, evaluate("commutant sample #" + std::to_string(k), op, d, config));
    }
    if (samples > 0 && scan.rejected * 10 > samples * 9)
      throw std::runtime_error("commutant sampling rejected " + std::to_string(scan.rejected) + " of " +
                               std::to_string(samples) + " candidates for " + scan.partition);
    if (shifted > 0) scan.notes.push_back(std::to_string(shifted) + " samples shifted to restore positive definiteness");
  }
  summarize(scan);
  return scan;
}

EigenvalueGraph eigenvalue_graph(const Decomposition& d) {
  EigenvalueGraph g;
  const int s = d.partition().s();
  std::vector<Module> mods;
  for (int i = 0; i <= s; ++i)
    for (int j = i + 1; j <= s; ++j)
      if (auto m = d.find(ModuleLabel::m(i, j))) {
        g.nodes.push_back(m->label);
        mods.push_back(*m);
      }
  auto node = [&](int i, int j) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < g.nodes.size(); ++k)
      if (g.nodes[k] == ModuleLabel::m(i, j)) return k;
    return std::nullopt;
  };
  std::vector<std::size_t> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };

  for (int i = 0; i <= s; ++i)
    for (int j = i + 1; j <= s; ++j)
      for (int k = j + 1; k <= s; ++k) {
        const auto a = node(i, j), b = node(j, k), c = node(i, k);
        if (!a || !b || !c) continue;
        std::set<std::size_t> target(mods[*c].indices.begin(), mods[*c].indices.end());
        bool projects = false;
        for (auto x : mods[*a].indices)
          for (auto y : mods[*b].indices)
            for (const auto& t : d.table()(x, y)) projects = projects || target.count(t.index) > 0;
        if (!projects) continue;
        for (auto [u, v] : {std::pair{*a, *b}, std::pair{*b, *c}}) {
          g.edges.emplace_back(u, v);
          parent[root(u)] = root(v);
        }
      }
  std::set<std::size_t> roots;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) roots.insert(root(k));
  g.components = roots.size();
  return g;
}

Classification classify(const Partition& p, const ClassifyConfig& config) {
  Classification c;
  c.partition = p.to_string();
  c.expected = expected_summary(p);
  const Decomposition d = build_decomposition(p);

  c.relations = verify_bracket_relations(d);
  for (const auto& check : c.relations.checks)
    for (const auto& v : check.violations) c.violations.push_back(check.name + ": " + v);
  c.normalizer = normalizer_check(d, config.scan.go.rank_tol);
  if (!c.normalizer.ok())
    c.violations.push_back("normalizer has dimension " + std::to_string(c.normalizer.computed_dim) + ", expected " +
                           std::to_string(c.normalizer.expected_dim));

  c.diagonal = scan_diagonal(d, config.grid, config.scan);
  c.commutant = scan_commutant(d, commutant_basis(d, config.scan.go.rank_tol), config.commutant_samples, config.scan);
  for (const auto* scan : {&c.diagonal, &c.commutant})
    for (const auto& v : scan->violations) c.violations.push_back(scan->kind + " scan: " + v);

  if (!c.violations.empty())
    c.observed = Summary::Violation;
  else if (c.diagonal.summary == Summary::OneParameterFamily || c.commutant.summary == Summary::OneParameterFamily)
    c.observed = Summary::OneParameterFamily;
  else
    c.observed = Summary::StandardOnly;
  if (c.observed != c.expected && c.observed != Summary::Violation)
    c.violations.push_back("observed summary " + to_string(c.observed) + " but expected " + to_string(c.expected));
  return c;
}

}  // namespace spgo
