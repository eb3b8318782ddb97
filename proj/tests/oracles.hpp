#pragma once

// Independent reference computations for the unit and acceptance tests. Nothing here
// calls into the library beyond its value types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "clarkbmo/blaschke.hpp"
#include "clarkbmo/measure.hpp"

namespace oracle {

using clarkbmo::cplx;
using clarkbmo::kTwoPi;

inline cplx random_in_disk(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = rmax * std::sqrt(u(rng));
  return std::polar(r, kTwoPi * u(rng));
}

inline cplx random_unimodular(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  return std::polar(1.0, u(rng));
}

inline cplx random_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  return {re, n(rng)};
}

inline clarkbmo::BlaschkeProduct random_blaschke(std::mt19937_64& rng, std::size_t degree,
                                                 double rmax = 0.8) {
  std::vector<cplx> zeros;
  for (std::size_t k = 0; k < degree; ++k) zeros.push_back(random_in_disk(rng, rmax));
  return clarkbmo::BlaschkeProduct(std::move(zeros), random_unimodular(rng));
}

/// Random atoms kept at least `gap` apart, random masses in [0.1, 1].
inline clarkbmo::MeasurePtr random_measure(std::mt19937_64& rng, std::size_t n, double gap = 1e-3) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::uniform_real_distribution<double> m(0.1, 1.0);
  std::vector<double> angles;
  while (angles.size() < n) {
    const double a = u(rng);
    bool ok = true;
    for (double b : angles) {
      double d = std::abs(a - b);
      d = std::min(d, kTwoPi - d);
      ok = ok && d > gap;
    }
    if (ok) angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  std::vector<clarkbmo::CirclePoint> atoms;
  std::vector<double> masses;
  for (double a : angles) {
    atoms.emplace_back(a);
    masses.push_back(m(rng));
  }
  return std::make_shared<const clarkbmo::DiscreteMeasure>(std::move(atoms), std::move(masses));
}

inline clarkbmo::MeasurePtr haar(std::size_t n) {
  return std::make_shared<const clarkbmo::DiscreteMeasure>(clarkbmo::DiscreteMeasure::haar_roots(n));
}

/// Plain product evaluation gamma * prod (z - a)/(1 - conj(a) z).
inline cplx blaschke_value(const std::vector<cplx>& zeros, cplx gamma, cplx z) {
  cplx p = gamma;
  for (const auto& a : zeros) p *= (z - a) / (1.0 - std::conj(a) * z);
  return p;
}

/// Central finite-difference derivative on the circle (step h in the tangent direction).
inline cplx blaschke_derivative_fd(const std::vector<cplx>& zeros, cplx gamma, cplx z,
                                   double h = 1e-5) {
  const cplx t = cplx(0.0, 1.0) * z * h;
  return (blaschke_value(zeros, gamma, z + t) - blaschke_value(zeros, gamma, z - t)) / (2.0 * t);
}

/// Mean oscillation of b over the atom index set `members`.
inline double oscillation(const clarkbmo::DiscreteMeasure& mu, const std::vector<cplx>& b,
                          const std::vector<std::size_t>& members) {
  double mass = 0.0;
  cplx s = 0.0;
  for (auto k : members) {
    mass += mu.mass(k);
    s += b[k] * mu.mass(k);
  }
  const cplx mean = s / mass;
  double osc = 0.0;
  for (auto k : members) osc += std::abs(b[k] - mean) * mu.mass(k);
  return osc / mass;
}

/// Brute-force BMO: every contiguous circular index window plus the whole set.
inline double bmo_bruteforce(const clarkbmo::DiscreteMeasure& mu, const std::vector<cplx>& b) {
  const std::size_t n = mu.size();
  double best = 0.0;
  std::vector<std::size_t> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = k;
  best = oscillation(mu, b, all);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> members;
    for (std::size_t len = 1; len < n; ++len) {
      members.push_back((i + len - 1) % n);
      best = std::max(best, oscillation(mu, b, members));
    }
  }
  return best;
}

/// Random zero-mean values: draw, then subtract the mu-mean.
inline std::vector<cplx> zero_mean_values(std::mt19937_64& rng, const clarkbmo::DiscreteMeasure& mu,
                                          bool real_only) {
  std::vector<cplx> v(mu.size());
  cplx s = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    v[k] = random_normal(rng);
    if (real_only) v[k] = v[k].real();
    s += v[k] * mu.mass(k);
  }
  for (auto& x : v) x -= s / mu.total_mass();
  return v;
}

}  // namespace oracle
