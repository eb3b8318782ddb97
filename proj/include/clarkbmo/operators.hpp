#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clarkbmo/linalg.hpp"
#include "clarkbmo/model.hpp"

namespace clarkbmo {

enum class OperatorKind { hankel, toeplitz };

struct OperatorMatrix {
  CMatrix entries;
  OperatorKind kind = OperatorKind::hankel;
  std::string domain_basis;
  std::string codomain_basis;

  std::size_t n() const { return static_cast<std::size_t>(entries.rows()); }
};

/// entry(l, k) = gamma[k + l] for gamma of odd length 2n - 1, in the monomial bases.
OperatorMatrix hankel_matrix_classical(const std::vector<cplx>& gamma);

/// Normalized Clark kernels sqrt(sigma_j) k_j of (theta, alpha) sampled on the grid, one column each.
CMatrix clark_basis_on_grid(const ClarkMeasure& cm, const QuadratureGrid& grid);

/// Grid values of the standard symbol whose trace on the Clark atoms of (theta^2, alpha) is p.
/// The trace must have zero mean against that measure.
std::vector<cplx> symbol_grid_from_trace(const BlaschkeProduct& theta, cplx alpha, const SampledFunction& p,
                                         const QuadratureGrid& grid);

/// Truncated Hankel matrix int phi xi e_j e_k dm in the Clark basis of (theta, alpha),
/// codomain basis conj(z e_k).
OperatorMatrix truncated_hankel_matrix_grid(const BlaschkeProduct& theta, cplx alpha,
                                            const std::vector<cplx>& phi_grid, const QuadratureGrid& grid);

/// As above with the standard symbol given by its trace on the Clark atoms of (theta^2, alpha).
OperatorMatrix truncated_hankel_matrix(const BlaschkeProduct& theta, cplx alpha, const SampledFunction& phi,
                                       const QuadratureGrid& grid);

/// <psi e_j, e_k> in the Clark basis of (theta, alpha).
OperatorMatrix truncated_toeplitz_matrix(const BlaschkeProduct& theta, cplx alpha,
                                         const std::vector<cplx>& psi_grid, const QuadratureGrid& grid);

/// Trace on the Clark atoms of (theta^2, alpha) of the orthogonal projection of the raw
/// symbol onto conj(K_{theta^2} cap z H^2).
SampledFunction standardize_symbol(const BlaschkeProduct& theta, cplx alpha, const std::vector<cplx>& raw_grid,
                                   const QuadratureGrid& grid);

/// {"n": n, "entries": [[re, im], ...]} row-major.
std::string to_json(const OperatorMatrix& m);
OperatorMatrix operator_matrix_from_json(std::string_view text);

}  // namespace clarkbmo
