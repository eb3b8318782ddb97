#pragma once

#include <vector>

#include "clarkbmo/clark.hpp"

namespace clarkbmo {

/// M equispaced nodes on the circle, weight 1/M each.
class QuadratureGrid {
 public:
  explicit QuadratureGrid(std::size_t m = 4096);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<cplx>& nodes() const { return nodes_; }
  cplx node(std::size_t k) const { return nodes_[k]; }
  double weight() const { return 1.0 / static_cast<double>(nodes_.size()); }

  /// Trapezoidal mean of sampled values.
  cplx integrate(const std::vector<cplx>& values) const;

 private:
  std::vector<cplx> nodes_;
};

/// Element of the model space given by its trace on the Clark atoms of (theta, alpha),
/// F(z) = sum f(xi) sigma{xi} (1 - conj(alpha) theta(z)) / (1 - conj(xi) z).
class ModelSpaceFunction {
 public:
  ModelSpaceFunction(ClarkMeasure cm, std::vector<cplx> trace);

  const ClarkMeasure& clark() const { return cm_; }
  const std::vector<cplx>& trace() const { return trace_; }

  /// Valid on the plane minus the poles of theta; atoms are removable and return the trace.
  cplx operator()(cplx z) const;
  std::vector<cplx> on_grid(const QuadratureGrid& grid) const;

  /// (1 - conj(alpha) theta(z)) / (1 - conj(xi_j) z), via the divided difference of theta near xi_j.
  cplx kernel(std::size_t j, cplx z) const;
  cplx kernel(std::size_t j, cplx z, cplx theta_z) const;

 private:
  ClarkMeasure cm_;
  std::vector<cplx> trace_;
};

/// Value at z of the model-space function with trace f on the atoms of cm.
cplx embed_inverse(const ClarkMeasure& cm, const SampledFunction& f, cplx z);

double l2_norm_circle(const ModelSpaceFunction& f, const QuadratureGrid& grid);
double l1_norm_circle(const ModelSpaceFunction& f, const QuadratureGrid& grid);

/// | int |F| dm - mean over beta of sum_{xi in supp sigma_beta} |F(xi)| sigma_beta{xi} |
/// with beta on an equispaced grid of beta_count points.
double aleksandrov_disintegration_check(const ModelSpaceFunction& f, std::size_t beta_count,
                                        const QuadratureGrid& grid = QuadratureGrid());

struct ContourOptions {
  double radial_offset = 0.1;
  double tolerance = 1e-13;  ///< relative to sum |f| sigma
  int max_pieces = 20000;  ///< adaptive subintervals per contour segment
  double atom_clearance = 1e-6;
};

/// sum over atoms in the arc of f(xi) sigma{xi}, computed as
/// -(1/2 pi i) times the contour integral of F(z) / (z (1 - conj(alpha) theta(z))) over the
/// boundary of the annular sector 1 - r <= |z| <= 1 + r spanning the arc.
cplx arc_mean_via_contour(const ClarkMeasure& cm, const SampledFunction& f, const Arc& arc,
                          const ContourOptions& opts = {});

struct Symmetrization {
  ModelSpaceFunction g1;
  ModelSpaceFunction g2;
  /// max over the grid of |G_j - theta conj(G_j)| and of the mismatch with (F +- theta conj F)
  double identity_residual = 0.0;
  double l1_f = 0.0;
  double l1_g1 = 0.0;
  double l1_g2 = 0.0;
};

/// G1 = (F + theta conj F)/2, G2 = (F - theta conj F)/(2i); requires F(0) = 0.
Symmetrization symmetrize(const ModelSpaceFunction& f, const QuadratureGrid& grid = QuadratureGrid());

}  // namespace clarkbmo
