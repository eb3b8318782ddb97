#include "clarkbmo/operators.hpp"

#include <cmath>

#include "json.hpp"

#include "clarkbmo/error.hpp"

namespace clarkbmo {

OperatorMatrix hankel_matrix_classical(const std::vector<cplx>& gamma) {
  if (gamma.empty() || gamma.size() % 2 == 0) throw Error("gamma must have odd length 2n - 1");
  const auto n = static_cast<Eigen::Index>((gamma.size() + 1) / 2);
  OperatorMatrix out;
  out.entries.resize(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index k = 0; k < n; ++k) out.entries(l, k) = gamma[static_cast<std::size_t>(k + l)];
  }
  out.kind = OperatorKind::hankel;
  out.domain_basis = "monomial z^k";
  out.codomain_basis = "monomial conj(z^(l+1))";
  return out;
}

CMatrix clark_basis_on_grid(const ClarkMeasure& cm, const QuadratureGrid& grid) {
  const std::size_t n = cm.measure().size();
  const ModelSpaceFunction probe(cm, std::vector<cplx>(n, 0.0));
  CMatrix e(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const cplx z = grid.node(g);
    const cplx tz = cm.theta(z);
    for (std::size_t j = 0; j < n; ++j) {
      e(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(j)) =
          std::sqrt(cm.measure().mass(j)) * probe.kernel(j, z, tz);
    }
  }
  if (!e.allFinite()) throw Error("quadrature node too close to a pole");
  return e;
}

namespace {

void check_grid(const std::vector<cplx>& values, const QuadratureGrid& grid) {
  if (values.size() != grid.size()) throw Error("symbol grid has wrong size");
}

}  // namespace

std::vector<cplx> symbol_grid_from_trace(const BlaschkeProduct& theta, cplx alpha, const SampledFunction& p,
                                         const QuadratureGrid& grid) {
  const auto nu = clark_measure(theta.squared(), alpha);
  if (!(p.measure() == nu.measure())) throw Error("symbol trace does not live on the Clark atoms of theta^2");
  double scale = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) scale += std::abs(p[i]) * nu.measure().mass(i);
  if (std::abs(p.integral()) > 1e-9 * std::max(scale, 1e-300)) throw Error("symbol trace must have zero mean");
  std::vector<cplx> conj_trace(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) conj_trace[i] = std::conj(p[i]);
  auto out = ModelSpaceFunction(nu, std::move(conj_trace)).on_grid(grid);
  for (auto& v : out) v = std::conj(v);
  return out;
}

OperatorMatrix truncated_hankel_matrix_grid(const BlaschkeProduct& theta, cplx alpha,
                                            const std::vector<cplx>& phi_grid, const QuadratureGrid& grid) {
  check_grid(phi_grid, grid);
  const CMatrix e = clark_basis_on_grid(clark_measure(theta, alpha), grid);
  Eigen::VectorXcd w(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) w(static_cast<Eigen::Index>(g)) = phi_grid[g] * grid.node(g) * grid.weight();
  OperatorMatrix out;
  out.entries = e.transpose() * w.asDiagonal() * e;
  out.kind = OperatorKind::hankel;
  out.domain_basis = "clark";
  out.codomain_basis = "conjugated shifted clark";
  return out;
}

OperatorMatrix truncated_hankel_matrix(const BlaschkeProduct& theta, cplx alpha, const SampledFunction& phi,
                                       const QuadratureGrid& grid) {
  return truncated_hankel_matrix_grid(theta, alpha, symbol_grid_from_trace(theta, alpha, phi, grid), grid);
}

OperatorMatrix truncated_toeplitz_matrix(const BlaschkeProduct& theta, cplx alpha,
                                         const std::vector<cplx>& psi_grid, const QuadratureGrid& grid) {
  check_grid(psi_grid, grid);
  const CMatrix e = clark_basis_on_grid(clark_measure(theta, alpha), grid);
  Eigen::VectorXcd w(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) w(static_cast<Eigen::Index>(g)) = psi_grid[g] * grid.weight();
  OperatorMatrix out;
  // Row k, column j holds <psi e_j, e_k>.
  out.entries = e.adjoint() * w.asDiagonal() * e;
  out.kind = OperatorKind::toeplitz;
  out.domain_basis = "clark";
  out.codomain_basis = "clark";
  return out;
}

SampledFunction standardize_symbol(const BlaschkeProduct& theta, cplx alpha, const std::vector<cplx>& raw_grid,
                                   const QuadratureGrid& grid) {
  check_grid(raw_grid, grid);
  const auto nu = clark_measure(theta.squared(), alpha);
  const CMatrix e2 = clark_basis_on_grid(nu, grid);
  Eigen::VectorXcd conj_raw(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) conj_raw(static_cast<Eigen::Index>(g)) = std::conj(raw_grid[g]);
  // Coefficients of conj(raw) against the orthonormal basis of K_{theta^2}.
  const Eigen::VectorXcd c = e2.adjoint() * conj_raw * grid.weight();
  const auto& mu = nu.measure();
  std::vector<cplx> t(mu.size());
  cplx mean = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    t[i] = c(static_cast<Eigen::Index>(i)) / std::sqrt(mu.mass(i));
    mean += t[i] * mu.mass(i);
  }
  // Constant traces are the kernel at 0; removing them is the projection onto z H^2.
  mean /= mu.total_mass();
  for (auto& v : t) v = std::conj(v - mean);
  return SampledFunction(nu.base, std::move(t));
}

std::string to_json(const OperatorMatrix& m) {
  nlohmann::json j;
  j["n"] = m.entries.rows();
  auto entries = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
      entries.push_back({m.entries(r, c).real(), m.entries(r, c).imag()});
    }
  }
  j["entries"] = std::move(entries);
  j["kind"] = m.kind == OperatorKind::hankel ? "hankel" : "toeplitz";
  return j.dump();
}

OperatorMatrix operator_matrix_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_unsigned()) {
    throw ParseError("n", "matrix needs a non-negative integer n");
  }
  const auto n = j["n"].get<std::size_t>();
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].size() != n * n) {
    throw ParseError("entries", "entries must hold n*n [re, im] pairs");
  }
  OperatorMatrix out;
  out.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n * n; ++k) {
    const auto& e = j["entries"][k];
    const std::string field = "entries[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ParseError(field, "entry must be [re, im]");
    }
    const cplx v(e[0].get<double>(), e[1].get<double>());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ParseError(field, "entry is not finite");
    out.entries(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) = v;
  }
  if (j.contains("kind") && j["kind"] == "toeplitz") out.kind = OperatorKind::toeplitz;
  return out;
}

}  // namespace clarkbmo
