#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clarkbmo/circle.hpp"

namespace clarkbmo {

/// Zeros closer than this to the circle are rejected.
inline constexpr double kZeroMargin = 1e-9;

/// Value, first and second derivative at one point.
struct Jet {
  cplx value;
  cplx d1;
  cplx d2;
};

/// Finite Blaschke product gamma * prod (z - a_k) / (1 - conj(a_k) z).
class BlaschkeProduct {
 public:
  BlaschkeProduct(std::vector<cplx> zeros, cplx gamma = 1.0);

  /// z^n.
  static BlaschkeProduct monomial(std::size_t n);

  const std::vector<cplx>& zeros() const { return zeros_; }
  cplx gamma() const { return gamma_; }
  std::size_t degree() const { return zeros_.size(); }

  /// Rational evaluation; valid on the whole plane minus the poles 1/conj(a_k).
  cplx operator()(cplx z) const;

  cplx derivative(cplx z) const;
  cplx second_derivative(cplx z) const;

  /// theta, theta', theta''. Uses the logarithmic derivative away from the zeros and
  /// an exact product-rule recursion within 1e-8 of a zero.
  Jet jet(cplx z) const;

  /// Product-rule recursion only; also the fallback branch of jet().
  Jet jet_product_rule(cplx z) const;

  /// (theta(z) - theta(w)) / (z - w), exact telescoping form; theta'(z) when z == w.
  cplx divided_difference(cplx z, cplx w) const;

  /// Continuous boundary argument arg theta(e^{it}); strictly increasing, total rise 2pi n.
  double boundary_argument(double t) const;

  /// theta^2 (zeros doubled, gamma squared).
  BlaschkeProduct squared() const;

 private:
  void check_pole(cplx z) const;

  std::vector<cplx> zeros_;
  cplx gamma_;
};

/// Exactly degree() solutions of theta(xi) = alpha on the circle, increasing in angle.
std::vector<CirclePoint> solve_level_set(const BlaschkeProduct& theta, cplx alpha);

/// conj(alpha) xi theta'(xi) with alpha = theta(xi); checks it is positive real and
/// returns it (it equals |theta'(xi)|).
double argument_derivative_positivity(const BlaschkeProduct& theta, const CirclePoint& xi);

/// sup over `samples` equispaced boundary points of |theta''| / |theta'|^2.
double second_derivative_ratio(const BlaschkeProduct& theta, std::size_t samples = 512);

/// {"zeros":[[re,im],...],"gamma":[re,im]}
std::string serialize(const BlaschkeProduct& theta);
BlaschkeProduct deserialize_blaschke(std::string_view text);

}  // namespace clarkbmo
