#include "clarkbmo/clark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "clarkbmo/error.hpp"

namespace clarkbmo {

ClarkMeasure clark_measure(const BlaschkeProduct& theta, cplx alpha) {
  auto atoms = solve_level_set(theta, alpha);
  std::vector<double> masses;
  masses.reserve(atoms.size());
  for (const auto& xi : atoms) masses.push_back(1.0 / std::abs(theta.derivative(xi.value())));
  const cplx t0c = alpha * std::conj(theta(0.0));
  return ClarkMeasure{std::make_shared<const DiscreteMeasure>(std::move(atoms), std::move(masses)),
                      theta, alpha, -t0c / (1.0 - t0c)};
}

cplx discrete_hilbert_transform(const DiscreteMeasure& mu, const CirclePoint& z) {
  const cplx zv = z.value();
  const std::size_t skip = mu.find_atom(z);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i == skip) continue;
    sum += mu.mass(i) / (1.0 - std::conj(mu.atom(i).value()) * zv);
  }
  return sum;
}

cplx hilbert_transform_closed_form(const ClarkMeasure& cm, const CirclePoint& xi0) {
  if (cm.measure().find_atom(xi0) == cm.measure().size()) throw Error("point is not an atom");
  const Jet j = cm.theta.jet(xi0.value());
  return cm.alpha * j.d2 / (2.0 * j.d1 * j.d1) - cm.c_alpha;
}

double verify_cauchy_identity(const ClarkMeasure& cm, cplx z) {
  const auto& mu = cm.measure();
  cplx rhs = cm.c_alpha;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    rhs += mu.mass(i) / (1.0 - std::conj(mu.atom(i).value()) * z);
  }
  return std::abs(1.0 / (1.0 - std::conj(cm.alpha) * cm.theta(z)) - rhs);
}

double verify_herglotz(const ClarkMeasure& cm, cplx z) {
  const auto& mu = cm.measure();
  const double r2 = std::norm(z);
  double poisson = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    poisson += mu.mass(i) * (1.0 - r2) / std::norm(1.0 - std::conj(mu.atom(i).value()) * z);
  }
  const cplx t = cm.theta(z);
  return std::abs(((cm.alpha + t) / (cm.alpha - t)).real() - poisson);
}

HerglotzInner::HerglotzInner(MeasurePtr mu, cplx alpha, double imaginary_shift)
    : mu_(std::move(mu)), alpha_(alpha), shift_(imaginary_shift) {
  if (!mu_ || mu_->size() == 0) throw Error("empty measure");
}

cplx HerglotzInner::operator()(cplx z) const {
  cplx s{0.0, shift_};
  for (std::size_t i = 0; i < mu_->size(); ++i) {
    const cplx w = std::conj(mu_->atom(i).value()) * z;
    s += mu_->mass(i) * (1.0 + w) / (1.0 - w);
  }
  return alpha_ * (s - 1.0) / (s + 1.0);
}

namespace {

/// Normalized-Lebesgue gaps m[xi, xi_-] and m[xi, xi_+]; the full circle for one atom.
std::pair<double, double> arclength_gaps(const DiscreteMeasure& mu, std::size_t i) {
  if (mu.size() == 1) return {1.0, 1.0};
  const double prev = mu.atom(mu.prev(i)).ccw_to(mu.atom(i)) / kTwoPi;
  const double next = mu.atom(i).ccw_to(mu.atom(mu.next(i))) / kTwoPi;
  return {prev, next};
}

std::pair<double, double> chord_gaps(const DiscreteMeasure& mu, std::size_t i) {
  if (mu.size() == 1) return {2.0, 2.0};
  return {mu.atom(mu.prev(i)).chord(mu.atom(i)), mu.atom(i).chord(mu.atom(mu.next(i)))};
}

bool disk_bound_holds(const DiscreteMeasure& mu, cplx alpha, const InnerEval& theta, double kappa,
                      int samples) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const cplx xi = mu.atom(i).value();
    const double s = mu.mass(i);
    const double radius = kappa * s;
    for (int k = 0; k < samples; ++k) {
      const cplx z = xi + std::polar(radius, kTwoPi * (k + 0.5) / samples);
      cplx t;
      try {
        t = theta(z);
      } catch (const Error&) {
        return false;  // pole inside the sampled disk
      }
      const double q = std::abs((alpha - t) / (xi - z));
      if (!std::isfinite(q) || q < 0.5 / s || q > 2.0 / s) return false;
    }
  }
  return true;
}

}  // namespace

bool disks_disjoint(const DiscreteMeasure& mu, double kappa) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = i + 1; j < mu.size(); ++j) {
      if (mu.atom(i).chord(mu.atom(j)) <= kappa * (mu.mass(i) + mu.mass(j))) return false;
    }
  }
  return true;
}

KappaEpsilon estimate_kappa_epsilon(const DiscreteMeasure& mu, cplx alpha, const InnerEval& theta,
                                    double kappa0, const KappaOptions& opts) {
  KappaEpsilon out;
  bool found = false;
  for (int j = 0; j <= opts.max_halvings; ++j) {
    const double kappa = std::ldexp(kappa0, -j);
    if (disk_bound_holds(mu, alpha, theta, kappa, opts.boundary_samples)) {
      out.kappa = kappa;
      out.halvings = j;
      found = true;
      break;
    }
  }
  if (!found) throw Error("kappa search failed");

  double eps = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= opts.grid_radii; ++r) {
    const double radius = static_cast<double>(r) / opts.grid_radii;
    for (int a = 0; a < opts.grid_angles; ++a) {
      const cplx z = std::polar(radius, kTwoPi * a / opts.grid_angles);
      bool excluded = false;
      for (std::size_t i = 0; i < mu.size() && !excluded; ++i) {
        excluded = std::abs(z - mu.atom(i).value()) < out.kappa * mu.mass(i);
      }
      if (!excluded) eps = std::min(eps, std::abs(alpha - theta(z)));
    }
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error("epsilon estimate is not positive");
  out.epsilon = eps;
  return out;
}

namespace {

ConditionReport neighbour_constants(const DiscreteMeasure& mu) {
  if (mu.size() == 0) throw Error("empty measure");
  ConditionReport rep;
  rep.A_mu = rep.tilde_A = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto [cp, cn] = chord_gaps(mu, i);
    const auto [mp, mn] = arclength_gaps(mu, i);
    for (double g : {cp, cn}) {
      rep.A_mu = std::min(rep.A_mu, mu.mass(i) / g);
      rep.B_mu = std::max(rep.B_mu, mu.mass(i) / g);
    }
    for (double g : {mp, mn}) {
      rep.tilde_A = std::min(rep.tilde_A, mu.mass(i) / g);
      rep.tilde_B = std::max(rep.tilde_B, mu.mass(i) / g);
    }
    rep.C_mu = std::max(rep.C_mu, std::abs(discrete_hilbert_transform(mu, mu.atom(i))));
  }
  rep.degenerate = mu.size() == 1;
  rep.satisfied[0] = true;
  rep.satisfied[1] = rep.A_mu > 0.0 && std::isfinite(rep.B_mu);
  rep.satisfied[2] = std::isfinite(rep.C_mu);
  return rep;
}

}  // namespace

KappaEpsilon estimate_kappa_epsilon(const ClarkMeasure& cm, const KappaOptions& opts) {
  const auto rep = neighbour_constants(cm.measure());
  return estimate_kappa_epsilon(cm.measure(), cm.alpha, [&](cplx z) { return cm.theta(z); },
                                0.5 / rep.tilde_B, opts);
}

ConditionReport check_conditions(const DiscreteMeasure& mu, const KappaOptions& opts) {
  auto rep = neighbour_constants(mu);
  auto ptr = std::make_shared<const DiscreteMeasure>(mu);
  const HerglotzInner theta(ptr, 1.0);
  const auto ke = estimate_kappa_epsilon(mu, 1.0, theta, 0.5 / rep.tilde_B, opts);
  rep.kappa = ke.kappa;
  rep.epsilon = ke.epsilon;
  return rep;
}

ConditionReport check_conditions(const ClarkMeasure& cm, const KappaOptions& opts) {
  auto rep = neighbour_constants(cm.measure());
  const auto ke = estimate_kappa_epsilon(cm.measure(), cm.alpha,
                                         [&](cplx z) { return cm.theta(z); }, 0.5 / rep.tilde_B, opts);
  rep.kappa = ke.kappa;
  rep.epsilon = ke.epsilon;
  return rep;
}

std::string to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["A_mu"] = r.A_mu;
  j["B_mu"] = r.B_mu;
  j["C_mu"] = r.C_mu;
  j["tilde_A"] = r.tilde_A;
  j["tilde_B"] = r.tilde_B;
  j["kappa"] = r.kappa;
  j["epsilon"] = r.epsilon;
  j["satisfied"] = {r.satisfied[0], r.satisfied[1], r.satisfied[2]};
  j["degenerate"] = r.degenerate;
  return j.dump();
}

}  // namespace clarkbmo
