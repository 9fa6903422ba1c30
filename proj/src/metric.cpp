#include "spgo/metric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spgo/rng.hpp"

namespace spgo {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

Eigen::VectorXd embed(const std::vector<std::size_t>& indices, const Eigen::VectorXd& coords, std::size_t dim_g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_g));
  for (std::size_t k = 0; k < indices.size(); ++k)
    out(static_cast<Eigen::Index>(indices[k])) = coords(static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace

Chart orthonormalize(const Decomposition& d) {
  Chart chart;
  for (const auto& m : d.modules())
    for (auto k : m.indices) {
      chart.basis_indices.push_back(k);
      chart.scale_factors.push_back(1.0 / std::sqrt(static_cast<double>(d.basis().norm_squared(k))));
      chart.module_of.push_back(m.label);
    }
  return chart;
}

// ---------------------------------------------------------------------------
// Specs

std::string MetricSpec::to_string() const {
  if (const auto* diag = std::get_if<DiagonalByModule>(&value)) {
    std::string out = "diag:";
    for (std::size_t i = 0; i < diag->eigenvalues.size(); ++i) {
      if (i > 0) out += ",";
      out += diag->eigenvalues[i].first.to_string() + "=" + format_double(diag->eigenvalues[i].second);
    }
    return out;
  }
  const auto& full = std::get<FullOperator>(value);
  if (!full.source.empty()) return "full:@" + full.source;
  return "full:" + std::to_string(full.matrix.rows()) + "x" + std::to_string(full.matrix.cols());
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MetricError("cannot open matrix file " + path.string());
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw MetricError("invalid number '" + token + "' in " + path.string());
    values.push_back(v);
  }
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(values.size()))));
  if (static_cast<std::size_t>(dim * dim) != values.size())
    throw MetricError("matrix file " + path.string() + " does not hold a square matrix (" +
                      std::to_string(values.size()) + " entries)");
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = values[static_cast<std::size_t>(r * dim + c)];
  return m;
}

MetricSpec parse_metric_spec(std::string_view text, const std::filesystem::path& base_dir) {
  if (text.starts_with("full:")) {
    const std::string_view rest = text.substr(5);
    if (!rest.starts_with("@") || rest.size() < 2) throw MetricError("full metric spec must be 'full:@path'");
    std::filesystem::path path{std::string(rest.substr(1))};
    const std::string source = path.string();
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return {FullOperator{read_matrix_file(path), source}};
  }
  if (!text.starts_with("diag:")) throw MetricError("metric spec must start with 'diag:' or 'full:'");

  DiagonalByModule diag;
  std::set<ModuleLabel> seen;
  std::string_view rest = text.substr(5);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw MetricError("expected 'label=value' in metric spec, got '" + std::string(item) + "'");
    ModuleLabel label;
    try {
      label = parse_module_label(item.substr(0, eq));
    } catch (const std::invalid_argument& e) {
      throw MetricError(e.what());
    }
    const std::string_view number = item.substr(eq + 1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc{} || ptr != number.data() + number.size() || number.empty())
      throw MetricError("invalid eigenvalue '" + std::string(number) + "' in metric spec");
    if (!(value > 0) || !std::isfinite(value))
      throw MetricError("eigenvalue for " + label.to_string() + " must be positive (metric must be positive definite)");
    if (!seen.insert(label).second) throw MetricError("label " + label.to_string() + " given twice");
    diag.eigenvalues.emplace_back(label, value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
    if (rest.empty()) throw MetricError("trailing comma in metric spec");
  }
  return {std::move(diag)};
}

// ---------------------------------------------------------------------------
// Operators

std::vector<Eigen::MatrixXd> isotropy_action(const Decomposition& d) {
  const Module m{ModuleLabel::n_block(), d.m_indices()};
  std::vector<Eigen::MatrixXd> out;
  out.reserve(d.dim_h());
  for (auto a : d.h_indices()) out.push_back(restricted_ad(d, a, m));
  return out;
}

double equivariance_residual(const Eigen::MatrixXd& a, const Decomposition& d) {
  const double norm = a.norm();
  if (norm == 0.0) return 0.0;
  double worst = 0;
  for (const auto& rho : isotropy_action(d)) worst = std::max(worst, (rho * a - a * rho).norm() / norm);
  return worst;
}

MetricOperator make_operator(Eigen::MatrixXd matrix, const Decomposition& d) {
  MetricOperator op;
  op.equivariance_residual = equivariance_residual(matrix, d);
  op.min_eigenvalue =
      matrix.size() == 0 ? 0.0 : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(matrix, Eigen::EigenvaluesOnly).eigenvalues()(0);
  op.matrix = std::move(matrix);
  return op;
}

MetricOperator metric_operator(const MetricSpec& spec, const Decomposition& d) {
  const auto dim = static_cast<Eigen::Index>(d.dim_m());
  Eigen::MatrixXd matrix;

  if (const auto* diag = std::get_if<DiagonalByModule>(&spec.value)) {
    Eigen::VectorXd eig = Eigen::VectorXd::Ones(dim);
    std::map<std::size_t, Eigen::Index> position;
    for (std::size_t k = 0; k < d.m_indices().size(); ++k) position[d.m_indices()[k]] = static_cast<Eigen::Index>(k);
    // Aggregates first, so a sub-block entry overrides its M0j value.
    auto entries = diag->eigenvalues;
    std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
      return (x.first.type == ModuleLabel::Type::Msub) < (y.first.type == ModuleLabel::Type::Msub);
    });
    for (const auto& [label, value] : entries) {
      const auto module = label.type == ModuleLabel::Type::H ? std::nullopt : d.find(label);
      if (!module) throw MetricError("unknown module label " + label.to_string() + " for partition " + d.partition().to_string());
      for (auto k : module->indices) eig(position.at(k)) = value;
    }
    matrix = eig.asDiagonal();
  } else {
    matrix = std::get<FullOperator>(spec.value).matrix;
    if (matrix.rows() != dim || matrix.cols() != dim)
      throw MetricError("full operator is " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                        " but dim m = " + std::to_string(dim));
    if (dim > 0 && (matrix - matrix.transpose()).norm() > 1e-12 * matrix.norm())
      throw MetricError("full operator is not symmetric");
    matrix = 0.5 * (matrix + matrix.transpose());
  }

  MetricOperator op = make_operator(std::move(matrix), d);
  if (dim > 0 && !(op.min_eigenvalue > 0))
    throw MetricError("metric operator is not positive definite (smallest eigenvalue " + format_double(op.min_eigenvalue) + ")");
  if (op.equivariance_residual > kEquivarianceCap)
    throw MetricError("metric operator is not Ad(H)-equivariant (residual " + format_double(op.equivariance_residual) + ")");
  return op;
}

// ---------------------------------------------------------------------------
// Geodesic criterion

GeodesicSolution geodesic_solve(const MetricOperator& op, const Eigen::VectorXd& x, const Decomposition& d,
                                double rank_tol) {
  if (x.size() != static_cast<Eigen::Index>(d.dim_m())) throw DimensionMismatch("test vector does not match dim m");
  const double x_norm = x.norm();
  if (x_norm == 0.0) throw std::invalid_argument("geodesic_solve requires X != 0");

  const auto& ortho = d.ortho();
  const std::size_t dim_g = d.basis().size();
  const Eigen::VectorXd ax_m = op.matrix * x;
  const Eigen::VectorXd xg = embed(d.m_indices(), x, dim_g);
  const Eigen::VectorXd axg = embed(d.m_indices(), ax_m, dim_g);

  // Column k is [u_k, AX] for the k-th basis vector of h.
  Eigen::MatrixXd columns = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_g), static_cast<Eigen::Index>(d.dim_h()));
  for (std::size_t k = 0; k < d.dim_h(); ++k) {
    const std::size_t hk = d.h_indices()[k];
    for (std::size_t j = 0; j < d.m_indices().size(); ++j) {
      const double c = ax_m(static_cast<Eigen::Index>(j));
      if (c == 0.0) continue;
      for (const auto& t : ortho.terms(hk, d.m_indices()[j]))
        columns(static_cast<Eigen::Index>(t.index), static_cast<Eigen::Index>(k)) += c * t.coeff;
    }
  }
  const Eigen::VectorXd rhs = -ortho.bracket(xg, axg);

  GeodesicSolution sol;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(rank_tol);
  cod.compute(columns);
  sol.a = cod.solve(rhs);
  sol.rank = static_cast<std::size_t>(cod.rank());
  sol.residual = (columns * sol.a - rhs).norm() / (x_norm * ax_m.norm());
  return sol;
}

TestVector witness_vector(const Decomposition& d) {
  const Partition& p = d.partition();
  TestVector w;
  w.coords = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.dim_m()));
  const Basis& basis = d.basis();
  if (p.n0() == 1 && p.s() > 1) {
    const auto m12 = d.find(ModuleLabel::m(1, 2));
    const std::size_t f11 = basis.at({Kind::F, 1, 1});
    const std::size_t e12 = basis.at({Kind::E, 1, 2});
    const std::size_t x12 = m12->indices.front();
    // Coordinates are orthonormal, so b = |b| u.
    w.coords(static_cast<Eigen::Index>(*d.m_position(f11))) = std::sqrt(static_cast<double>(basis.norm_squared(f11)));
    w.coords(static_cast<Eigen::Index>(*d.m_position(e12))) = std::sqrt(static_cast<double>(basis.norm_squared(e12)));
    w.coords(static_cast<Eigen::Index>(*d.m_position(x12))) = 1.0;
    w.description = "witness f_11 + e_12 + u(" + basis[x12].name() + ")";
    return w;
  }
  w.description = "witness sum of first unit vector of each module";
  for (const auto& m : d.modules()) w.coords(static_cast<Eigen::Index>(*d.m_position(m.indices.front()))) = 1.0;
  return w;
}

std::vector<TestVector> go_test_set(const Decomposition& d, std::size_t random_samples, std::uint64_t seed) {
  std::vector<TestVector> out;
  const auto dim = static_cast<Eigen::Index>(d.dim_m());
  if (dim == 0) return out;
  const Chart chart = orthonormalize(d);
  const Basis& basis = d.basis();
  auto unit = [&](Eigen::Index k) { return Eigen::VectorXd::Unit(dim, k); };
  auto name = [&](Eigen::Index k) { return "u(" + basis[chart.basis_indices[static_cast<std::size_t>(k)]].name() + ")"; };

  out.push_back(witness_vector(d));
  for (Eigen::Index k = 0; k < dim; ++k) out.push_back({name(k), unit(k)});
  for (Eigen::Index k = 0; k < dim; ++k)
    for (Eigen::Index l = k + 1; l < dim; ++l)
      if (chart.module_of[static_cast<std::size_t>(k)] != chart.module_of[static_cast<std::size_t>(l)])
        out.push_back({name(k) + "+" + name(l), unit(k) + unit(l)});
  // Module covers: one unit vector from every module at once, varying one
  // module's choice at a time. Some inequalities (N against the rest) are only
  // visible on vectors touching all modules.
  std::vector<Eigen::Index> first;
  for (Eigen::Index k = 0; k < dim; ++k)
    if (k == 0 || chart.module_of[static_cast<std::size_t>(k)] != chart.module_of[static_cast<std::size_t>(k - 1)])
      first.push_back(k);
  if (first.size() > 2) {
    Eigen::VectorXd cover = Eigen::VectorXd::Zero(dim);
    for (auto k : first) cover(k) = 1.0;
    out.push_back({"module cover", cover / cover.norm()});
    for (Eigen::Index k = 0; k < dim; ++k) {
      const auto mod = chart.module_of[static_cast<std::size_t>(k)];
      const Eigen::Index f = *std::find_if(first.begin(), first.end(),
                                           [&](Eigen::Index i) { return chart.module_of[static_cast<std::size_t>(i)] == mod; });
      if (f == k) continue;
      Eigen::VectorXd v = cover - unit(f) + unit(k);
      out.push_back({"module cover with " + name(k), v / v.norm()});
    }
  }
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < random_samples; ++r) {
    auto rng = stream_rng(seed, Stream::TestVectors, r);
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
    out.push_back({"random #" + std::to_string(r), v / v.norm()});
  }
  return out;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Indeterminate: return "indeterminate";
  }
  return "?";
}

GoVerdict go_check(const MetricOperator& op, const Decomposition& d, const GoCheckConfig& config) {
  GoVerdict verdict;
  verdict.pass_tol = config.pass_tol;
  verdict.fail_tol = config.fail_tol;
  bool failed = false;
  bool all_below_pass = true;
  for (const auto& tv : go_test_set(d, config.random_samples, config.seed)) {
    const GeodesicSolution sol = geodesic_solve(op, tv.coords, d, config.rank_tol);
    verdict.records.push_back({tv.description, sol.residual, sol.rank});
    ++verdict.vectors_tested;
    if (verdict.worst_vector.empty() || sol.residual > verdict.max_residual) {
      verdict.max_residual = sol.residual;
      verdict.worst_vector = tv.description;
    }
    if (!(sol.residual < config.pass_tol)) all_below_pass = false;
    if (sol.residual > config.fail_tol) {
      failed = true;
      if (config.stop_on_fail) break;
    }
  }
  verdict.outcome = failed ? Outcome::Fail : all_below_pass ? Outcome::Pass : Outcome::Indeterminate;
  return verdict;
}

BiinvarianceReport biinvariance_restriction_check(const MetricOperator& op, const Decomposition& d, double tol) {
  const auto n_block = d.find(ModuleLabel::n_block());
  if (!n_block) throw std::invalid_argument("bi-invariance restriction requires n0 >= 1");
  // N comes first in the coordinate order of m.
  const auto dim_n = static_cast<Eigen::Index>(n_block->dim());
  const auto dim_p = op.matrix.rows() - dim_n;
  BiinvarianceReport r;
  const double norm = op.matrix.norm();
  r.leakage = norm == 0.0 ? 0.0 : op.matrix.bottomLeftCorner(dim_p, dim_n).norm() / norm;
  r.maps_n_into_n = r.leakage < tol;
  const Eigen::MatrixXd an = op.matrix.topLeftCorner(dim_n, dim_n);
  r.mean_eigenvalue = an.trace() / static_cast<double>(dim_n);
  r.deviation = (an - r.mean_eigenvalue * Eigen::MatrixXd::Identity(dim_n, dim_n)).norm() /
                (std::abs(r.mean_eigenvalue) * std::sqrt(static_cast<double>(dim_n)));
  r.scalar = r.deviation < tol;
  return r;
}

}  // namespace spgo
