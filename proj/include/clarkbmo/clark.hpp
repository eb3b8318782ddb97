#pragma once

#include <array>
#include <functional>
#include <string>

#include "clarkbmo/blaschke.hpp"
#include "clarkbmo/measure.hpp"

namespace clarkbmo {

/// Clark measure sigma_alpha of a finite Blaschke product: atoms at theta = alpha with
/// masses 1/|theta'|, plus the constant c_alpha with
/// 1/(1 - conj(alpha) theta(z)) = sum mass/(1 - conj(xi) z) + c_alpha, which forces
/// c_alpha = -alpha conj(theta(0)) / (1 - alpha conj(theta(0))).
struct ClarkMeasure {
  MeasurePtr base;
  BlaschkeProduct theta;
  cplx alpha;
  cplx c_alpha;

  const DiscreteMeasure& measure() const { return *base; }
};

ClarkMeasure clark_measure(const BlaschkeProduct& theta, cplx alpha);

/// Sum over atoms xi != z of mass(xi) / (1 - conj(xi) z).
cplx discrete_hilbert_transform(const DiscreteMeasure& mu, const CirclePoint& z);

/// alpha theta''(xi0) / (2 theta'(xi0)^2) - c_alpha, which equals the discrete Hilbert
/// transform of 1 at the atom xi0. Throws if xi0 is not an atom.
cplx hilbert_transform_closed_form(const ClarkMeasure& cm, const CirclePoint& xi0);

/// |1/(1 - conj(alpha) theta(z)) - sum mass/(1 - conj(xi) z) - c_alpha|
double verify_cauchy_identity(const ClarkMeasure& cm, cplx z);

/// |Re((alpha + theta)/(alpha - theta))(z) - sum mass (1 - |z|^2)/|1 - conj(xi) z|^2|
double verify_herglotz(const ClarkMeasure& cm, cplx z);

/// Inner function rebuilt from a discrete measure through the Herglotz representation,
/// theta = alpha (S - 1)/(S + 1) with S(z) = sum mass (1 + conj(xi) z)/(1 - conj(xi) z) + i*shift.
/// Its Clark measure at alpha is the given measure.
class HerglotzInner {
 public:
  HerglotzInner(MeasurePtr mu, cplx alpha, double imaginary_shift = 0.0);
  cplx operator()(cplx z) const;
  cplx alpha() const { return alpha_; }

 private:
  MeasurePtr mu_;
  cplx alpha_;
  double shift_;
};

struct KappaEpsilon {
  double kappa = 0.0;
  double epsilon = 0.0;
  int halvings = 0;
};

struct KappaOptions {
  int max_halvings = 20;
  int boundary_samples = 64;
  int grid_angles = 256;
  int grid_radii = 64;
};

using InnerEval = std::function<cplx(cplx)>;

/// Largest kappa in {kappa0 2^-j} for which the two-sided disk bound
/// 1/(2 sigma) <= |(alpha - theta(z))/(xi - z)| <= 2/sigma holds on sampled boundaries of
/// every disk |z - xi| <= kappa sigma{xi}; epsilon is the grid minimum of |alpha - theta|
/// over the closed disk with those open disks removed.
KappaEpsilon estimate_kappa_epsilon(const DiscreteMeasure& mu, cplx alpha, const InnerEval& theta,
                                    double kappa0, const KappaOptions& opts = {});
KappaEpsilon estimate_kappa_epsilon(const ClarkMeasure& cm, const KappaOptions& opts = {});

/// True when the closed disks |z - xi| <= kappa mass(xi) are pairwise disjoint.
bool disks_disjoint(const DiscreteMeasure& mu, double kappa);

struct ConditionReport {
  double A_mu = 0.0;
  double B_mu = 0.0;
  double C_mu = 0.0;
  double tilde_A = 0.0;
  double tilde_B = 0.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  std::array<bool, 3> satisfied{};
  /// Single atom: the two-neighbour clause is vacuous and (a) passes by convention.
  bool degenerate = false;
};

/// Neighbour-ratio and Hilbert-transform constants. kappa/epsilon use the inner function
/// rebuilt from mu at alpha = 1.
ConditionReport check_conditions(const DiscreteMeasure& mu, const KappaOptions& opts = {});
/// Same, with kappa/epsilon computed from the Blaschke product itself.
ConditionReport check_conditions(const ClarkMeasure& cm, const KappaOptions& opts = {});

std::string to_json(const ConditionReport& report);

}  // namespace clarkbmo
