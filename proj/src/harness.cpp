#include "clarkbmo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "clarkbmo/atomic.hpp"
#include "clarkbmo/bmo.hpp"
#include "clarkbmo/error.hpp"
#include "clarkbmo/format.hpp"
#include "clarkbmo/operators.hpp"

namespace clarkbmo {

using nlohmann::json;

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

namespace {

std::vector<std::size_t> positive_list(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field, field + " must be a nonempty array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_unsigned() || j[i].get<std::size_t>() == 0) {
      throw ParseError(field + "[" + std::to_string(i) + "]", "entries must be positive integers");
    }
    out.push_back(j[i].get<std::size_t>());
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("", "config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      if (!value.is_number_unsigned()) throw ParseError(key, "seed must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "trials") {
      if (!value.is_number_integer() || value.get<long long>() <= 0) throw ParseError(key, "trials must be positive");
      c.trials = value.get<int>();
    } else if (key == "n_values") {
      c.n_values = positive_list(value, key);
    } else if (key == "degree_values") {
      c.degree_values = positive_list(value, key);
    } else if (key == "grid_M") {
      if (!value.is_number_unsigned()) throw ParseError(key, "grid_M must be a positive integer");
      c.grid_M = value.get<std::size_t>();
      if (c.grid_M < 2 || (c.grid_M & (c.grid_M - 1)) != 0) throw ParseError(key, "grid_M must be a power of two");
    } else if (key == "tolerances") {
      if (!value.is_object()) throw ParseError(key, "tolerances must be an object");
      for (const auto& [name, tol] : value.items()) {
        if (!tol.is_number() || !(tol.get<double>() > 0.0)) throw ParseError(key + "." + name, "tolerance must be positive");
        c.tolerances[name] = tol.get<double>();
      }
    } else if (key == "output_path") {
      if (!value.is_string()) throw ParseError(key, "output_path must be a string");
      c.output_path = value.get<std::string>();
    } else if (key == "m_bound") {
      if (!value.is_number() || !(value.get<double>() > 0.0)) throw ParseError(key, "m_bound must be positive");
      c.m_bound = value.get<double>();
    } else if (key == "symbols_per_theta") {
      if (!value.is_number_integer() || value.get<long long>() <= 0) throw ParseError(key, "must be positive");
      c.symbols_per_theta = value.get<int>();
    } else {
      throw ParseError(key, "unknown config field");
    }
  }
  return c;
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["n_values"] = c.n_values;
  j["degree_values"] = c.degree_values;
  j["grid_M"] = c.grid_M;
  j["tolerances"] = c.tolerances;
  j["output_path"] = c.output_path;
  j["m_bound"] = c.m_bound;
  j["symbols_per_theta"] = c.symbols_per_theta;
  return j.dump();
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  std::uint64_t x = seed;
  std::uint64_t k = splitmix64(x);
  x = k ^ stream;
  k = splitmix64(x);
  x = k ^ trial;
  return splitmix64(x);
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
    : engine_(stream_key(seed, stream, trial)) {}

double TrialRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

/// Box-Muller on our own uniforms: std::normal_distribution is not portable across libraries.
double TrialRng::gaussian() {
  double u = uniform();
  while (u == 0.0) u = uniform();
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
}

cplx TrialRng::normal() {
  const double re = gaussian();
  const double im = gaussian();
  return cplx(re, im) / std::sqrt(2.0);
}

cplx TrialRng::unimodular() { return std::polar(1.0, kTwoPi * uniform()); }

cplx TrialRng::in_disk(double r) {
  const double rho = r * std::sqrt(uniform());
  return std::polar(rho, kTwoPi * uniform());
}

std::size_t TrialRng::below(std::size_t n) {
  if (n == 0) throw Error("empty range");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

namespace {

enum Stream : std::uint64_t {
  kCorollary1 = 1ULL << 32,
  kTheorem3 = 2ULL << 32,
  kAtomBound = 3ULL << 32,
  kCzLp = 4ULL << 32,
  kIdentity = 5ULL << 32,
  kVerify = 6ULL << 32,
};

json complex_list(const std::vector<cplx>& v) {
  auto a = json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

std::vector<cplx> complex_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, field + " must be an array");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ParseError(field + "[" + std::to_string(i) + "]", "expected [re, im]");
    }
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

BlaschkeProduct random_theta(TrialRng& rng, std::size_t degree) {
  std::vector<cplx> zeros(degree);
  for (auto& a : zeros) a = rng.in_disk(0.8);
  const cplx gamma = rng.unimodular();
  return BlaschkeProduct(std::move(zeros), gamma);
}

std::vector<cplx> random_zero_mean(TrialRng& rng, const DiscreteMeasure& mu) {
  std::vector<cplx> v(mu.size());
  cplx mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rng.normal();
    mean += v[i] * mu.mass(i);
  }
  mean /= mu.total_mass();
  for (auto& x : v) x -= mean;
  return v;
}

void update_envelope(RatioEnvelope& e, double ratio) {
  if (e.count == 0) {
    e.min_ratio = e.max_ratio = ratio;
  } else {
    e.min_ratio = std::min(e.min_ratio, ratio);
    e.max_ratio = std::max(e.max_ratio, ratio);
  }
  ++e.count;
}

/// Trace on the 2n-th roots of unity of sum gamma_m conj(xi)^(m+1).
std::vector<cplx> classical_symbol_trace(const std::vector<cplx>& gamma, const DiscreteMeasure& mu) {
  std::vector<cplx> p(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t m = 0; m < gamma.size(); ++m) {
      p[i] += gamma[m] * std::polar(1.0, -static_cast<double>(m + 1) * mu.atom(i).angle());
    }
  }
  return p;
}

struct Corollary1Eval {
  double op = 0.0;
  double bmo = 0.0;
};

Corollary1Eval evaluate_corollary1(const std::vector<cplx>& gamma) {
  const std::size_t n = (gamma.size() + 1) / 2;
  auto mu = std::make_shared<const DiscreteMeasure>(DiscreteMeasure::haar_roots(2 * n));
  const SampledFunction p(mu, classical_symbol_trace(gamma, *mu));
  return {operator_norm(hankel_matrix_classical(gamma).entries), bmo_norm(p).norm};
}

struct Theorem3Eval {
  double op = 0.0;
  double bmo = 0.0;
};

Theorem3Eval evaluate_theorem3(const BlaschkeProduct& theta, cplx alpha, const std::vector<cplx>& trace,
                               const QuadratureGrid& grid) {
  const auto nu = clark_measure(theta.squared(), alpha);
  const SampledFunction p(nu.base, trace);
  return {operator_norm(truncated_hankel_matrix(theta, alpha, p, grid).entries), bmo_norm(p).norm};
}

double atom_l1(std::size_t n, const std::vector<cplx>& values, const QuadratureGrid& grid) {
  const auto cm = clark_measure(BlaschkeProduct::monomial(2 * n), 1.0);
  return l1_norm_circle(ModelSpaceFunction(cm, values), grid);
}

}  // namespace

ExperimentReport run_corollary1(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw Error("n_values must be nonempty");
  ExperimentReport rep;
  rep.experiment = "corollary1";
  const double lo = 1.0 / 90.0, hi = 1e7 * cfg.m_bound;
  for (std::size_t n : cfg.n_values) {
    RatioEnvelope env;
    env.key = n;
    for (int t = 0; t < cfg.trials; ++t) {
      TrialRng rng(cfg.seed, kCorollary1 + n, static_cast<std::uint64_t>(t));
      std::vector<cplx> gamma(2 * n - 1);
      for (auto& g : gamma) g = rng.normal();
      const auto ev = evaluate_corollary1(gamma);
      if (ev.op == 0.0) {
        ++env.skipped;
        continue;
      }
      if (ev.bmo == 0.0) {
        rep.failures.push_back("n=" + std::to_string(n) + " trial " + std::to_string(t) +
                               ": zero BMO norm with nonzero matrix");
        continue;
      }
      const double ratio = ev.op / ev.bmo;
      if (!(ratio >= lo && ratio <= hi)) {
        rep.failures.push_back("n=" + std::to_string(n) + " trial " + std::to_string(t) + ": ratio " +
                               format_double(ratio) + " outside [1/90, 1e7 M_bound]");
      }
      update_envelope(env, ratio);
      json w;
      w["gamma"] = complex_list(gamma);
      rep.rows.push_back({rep.experiment, n, t, ev.op, ev.bmo, ratio, w.dump()});
    }
    rep.envelopes.push_back(env);
  }
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (const auto& e : rep.envelopes) {
    if (e.count == 0) continue;
    gmin = std::min(gmin, e.min_ratio);
    gmax = std::max(gmax, e.max_ratio);
  }
  rep.metrics["m_bound"] = cfg.m_bound;
  rep.metrics["lower_bound"] = lo;
  rep.metrics["upper_bound"] = hi;
  rep.metrics["cross_n_spread"] = gmax > 0.0 ? gmax / gmin : 0.0;
  return rep;
}

ExperimentReport run_theorem3(const ExperimentConfig& cfg) {
  if (cfg.degree_values.empty()) throw Error("degree_values must be nonempty");
  ExperimentReport rep;
  rep.experiment = "theorem3";
  const QuadratureGrid grid(cfg.grid_M);
  double worst_theta_spread = 1.0;
  for (std::size_t d : cfg.degree_values) {
    RatioEnvelope env;
    env.key = d;
    for (int t = 0; t < cfg.trials; ++t) {
      TrialRng rng(cfg.seed, kTheorem3 + d, static_cast<std::uint64_t>(t));
      const auto theta = random_theta(rng, d);
      const cplx alpha = rng.unimodular();
      const auto nu = clark_measure(theta.squared(), alpha);
      RatioEnvelope per_theta;
      for (int s = 0; s < cfg.symbols_per_theta; ++s) {
        const auto trace = random_zero_mean(rng, nu.measure());
        const auto ev = evaluate_theorem3(theta, alpha, trace, grid);
        if (ev.op == 0.0 && ev.bmo == 0.0) {
          ++env.skipped;
          continue;
        }
        const int row_trial = t * cfg.symbols_per_theta + s;
        const double ratio = ev.bmo > 0.0 ? ev.op / ev.bmo : std::numeric_limits<double>::infinity();
        if (!(ratio > 0.0) || !std::isfinite(ratio)) {
          rep.failures.push_back("degree " + std::to_string(d) + " trial " + std::to_string(row_trial) +
                                 ": ratio not positive and finite");
          continue;
        }
        update_envelope(env, ratio);
        update_envelope(per_theta, ratio);
        json w;
        w["theta"] = json::parse(serialize(theta));
        w["alpha"] = {alpha.real(), alpha.imag()};
        w["trace"] = complex_list(trace);
        w["grid"] = cfg.grid_M;
        rep.rows.push_back({rep.experiment, d, row_trial, ev.op, ev.bmo, ratio, w.dump()});
      }
      if (per_theta.count > 0) worst_theta_spread = std::max(worst_theta_spread, per_theta.max_ratio / per_theta.min_ratio);
    }
    rep.envelopes.push_back(env);
  }
  rep.metrics["symbols_per_theta"] = cfg.symbols_per_theta;
  rep.metrics["max_per_theta_spread"] = worst_theta_spread;
  return rep;
}

ExperimentReport run_atom_extension_bound(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw Error("n_values must be nonempty");
  ExperimentReport rep;
  rep.experiment = "atom-bound";
  const QuadratureGrid grid(cfg.grid_M);
  const double bound = cfg.tolerance("atom_l1_bound", 15.0);
  const double origin_tol = cfg.tolerance("atom_origin", 1e-9);
  double worst = 0.0, worst_origin = 0.0;
  for (std::size_t n : cfg.n_values) {
    RatioEnvelope env;
    env.key = n;
    const auto cm = clark_measure(BlaschkeProduct::monomial(2 * n), 1.0);
    const auto& mu = cm.measure();
    const std::size_t atoms = 2 * n;
    for (int t = 0; t < cfg.trials; ++t) {
      TrialRng rng(cfg.seed, kAtomBound + n, static_cast<std::uint64_t>(t));
      const std::size_t len = 2 + rng.below(atoms - 1);
      const std::size_t first = rng.below(atoms);
      std::vector<cplx> values(atoms, 0.0);
      cplx mean = 0.0;
      double mass = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const std::size_t i = (first + k) % atoms;
        values[i] = rng.normal();
        mean += values[i] * mu.mass(i);
        mass += mu.mass(i);
      }
      mean /= mass;
      double sup = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const std::size_t i = (first + k) % atoms;
        values[i] -= mean;
        sup = std::max(sup, std::abs(values[i]));
      }
      if (sup == 0.0) {
        ++env.skipped;
        continue;
      }
      // Scale so the largest value meets the atom bound 1/mu(arc) exactly.
      for (auto& v : values) v /= sup * mass;
      const ModelSpaceFunction F(cm, values);
      const double l1 = l1_norm_circle(F, grid);
      const double origin = std::abs(F(0.0));
      const double size = 1.0;  // sup |a| mu(arc) after scaling
      worst = std::max(worst, l1);
      worst_origin = std::max(worst_origin, origin);
      if (!(l1 < bound)) {
        rep.failures.push_back("n=" + std::to_string(n) + " trial " + std::to_string(t) + ": L1 norm " +
                               format_double(l1) + " not below " + format_double(bound));
      }
      if (origin > origin_tol) {
        rep.failures.push_back("n=" + std::to_string(n) + " trial " + std::to_string(t) + ": |F(0)| = " +
                               format_double(origin));
      }
      update_envelope(env, l1 / size);
      json w;
      w["n"] = n;
      w["values"] = complex_list(values);
      w["grid"] = cfg.grid_M;
      rep.rows.push_back({rep.experiment, n, t, l1, size, l1 / size, w.dump()});
    }
    rep.envelopes.push_back(env);
  }
  rep.metrics["l1_bound"] = bound;
  rep.metrics["max_l1"] = worst;
  rep.metrics["max_abs_F0"] = worst_origin;
  return rep;
}

ExperimentReport run_cz_vs_lp(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = "cz-vs-lp";
  const QuadratureGrid grid(cfg.grid_M);
  double cz_over_l1_min = std::numeric_limits<double>::infinity(), cz_over_l1_max = 0.0;
  double l1_over_lower_min = std::numeric_limits<double>::infinity(), l1_over_lower_max = 0.0;
  for (std::size_t d : cfg.degree_values) {
    if (d > 8) throw Error("cz-vs-lp supports degree at most 8");
    RatioEnvelope env;
    env.key = d;
    for (int t = 0; t < cfg.trials; ++t) {
      TrialRng rng(cfg.seed, kCzLp + d, static_cast<std::uint64_t>(t));
      const auto theta = random_theta(rng, d);
      const cplx alpha = rng.unimodular();
      const auto cm = clark_measure(theta, alpha);
      const auto trace = random_zero_mean(rng, cm.measure());
      const SampledFunction f(cm.base, trace);
      if (f.sup_norm() < 1e-12) {
        ++env.skipped;  // a single atom forces the zero trace
        continue;
      }
      const double tw = cz_decompose(f).total_weight;
      const auto lp = atomic_norm_lp(f);
      const double l1 = l1_norm_circle(ModelSpaceFunction(cm, trace), grid);
      const std::string tag = "degree " + std::to_string(d) + " trial " + std::to_string(t);
      if (lp.lower > tw * (1.0 + 1e-9)) rep.failures.push_back(tag + ": LP lower bound exceeds CZ weight");
      if (lp.lower > lp.upper * (1.0 + 1e-9)) rep.failures.push_back(tag + ": LP lower bound exceeds upper");
      const double ratio = tw / l1;
      cz_over_l1_min = std::min(cz_over_l1_min, ratio);
      cz_over_l1_max = std::max(cz_over_l1_max, ratio);
      if (lp.lower > 0.0) {
        l1_over_lower_min = std::min(l1_over_lower_min, l1 / lp.lower);
        l1_over_lower_max = std::max(l1_over_lower_max, l1 / lp.lower);
      }
      update_envelope(env, ratio);
      json w;
      w["theta"] = json::parse(serialize(theta));
      w["alpha"] = {alpha.real(), alpha.imag()};
      w["trace"] = complex_list(trace);
      w["grid"] = cfg.grid_M;
      w["lp_lower"] = lp.lower;
      w["lp_upper"] = lp.upper;
      rep.rows.push_back({rep.experiment, d, t, l1, tw, ratio, w.dump()});
    }
    rep.envelopes.push_back(env);
  }
  rep.metrics["cz_over_l1_min"] = cz_over_l1_min;
  rep.metrics["cz_over_l1_max"] = cz_over_l1_max;
  rep.metrics["l1_over_lp_lower_min"] = l1_over_lower_min;
  rep.metrics["l1_over_lp_lower_max"] = l1_over_lower_max;
  return rep;
}

bool IdentityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed(); });
}

namespace {

ClarkMeasure with_scaled_masses(const ClarkMeasure& cm, double scale) {
  if (scale == 1.0) return cm;
  std::vector<double> masses = cm.measure().masses();
  for (auto& m : masses) m *= scale;
  ClarkMeasure out = cm;
  out.base = std::make_shared<const DiscreteMeasure>(cm.measure().atoms(), std::move(masses));
  return out;
}

MeasurePtr random_measure(TrialRng& rng, std::size_t n) {
  std::vector<double> angles;
  while (angles.size() < n) {
    const double a = kTwoPi * rng.uniform();
    bool ok = true;
    for (double b : angles) {
      const double d = std::abs(a - b);
      ok = ok && std::min(d, kTwoPi - d) > 1e-3;
    }
    if (ok) angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  std::vector<CirclePoint> atoms;
  std::vector<double> masses;
  for (double a : angles) {
    atoms.emplace_back(a);
    masses.push_back(0.1 + 0.9 * rng.uniform());
  }
  return std::make_shared<const DiscreteMeasure>(std::move(atoms), std::move(masses));
}

Arc random_arc_avoiding(TrialRng& rng, const DiscreteMeasure& mu, double clearance) {
  for (;;) {
    const CirclePoint start(kTwoPi * rng.uniform());
    const Arc arc(start, kTwoPi * rng.uniform());
    bool ok = true;
    for (const auto& a : mu.atoms()) {
      ok = ok && std::min(a.ccw_to(arc.start()), arc.start().ccw_to(a)) >= clearance &&
           std::min(a.ccw_to(arc.end()), arc.end().ccw_to(a)) >= clearance;
    }
    if (ok) return arc;
  }
}

}  // namespace

IdentityReport run_identity_suite(const ExperimentConfig& cfg, double mass_scale) {
  IdentityReport rep;
  rep.checks.reserve(16);  // `add` hands out references that must stay valid
  const QuadratureGrid grid(cfg.grid_M);
  auto add = [&](std::string name, double tol_default) -> IdentityCheck& {
    rep.checks.push_back({name, 0.0, cfg.tolerance(name, tol_default), 0});
    return rep.checks.back();
  };
  auto rng_for = [&](std::uint64_t check, int i) { return TrialRng(cfg.seed, kIdentity + check, static_cast<std::uint64_t>(i)); };

  {
    auto& herglotz = add("herglotz", 1e-9);
    auto& cauchy = add("cauchy", 1e-9);
    for (int i = 0; i < 50; ++i) {
      auto rng = rng_for(1, i);
      const auto theta = random_theta(rng, 1 + static_cast<std::size_t>(i) % 6);
      const auto cm = with_scaled_masses(clark_measure(theta, rng.unimodular()), mass_scale);
      const cplx z = rng.in_disk(0.9);
      herglotz.max_residual = std::max(herglotz.max_residual, verify_herglotz(cm, z));
      cauchy.max_residual = std::max(cauchy.max_residual, verify_cauchy_identity(cm, z));
      ++herglotz.instances;
      ++cauchy.instances;
    }
  }
  {
    auto& hil = add("hilbert_closed_form", 1e-9);
    for (int i = 0; i < 50; ++i) {
      auto rng = rng_for(2, i);
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 6), rng.unimodular());
      for (const auto& xi : cm.measure().atoms()) {
        hil.max_residual = std::max(hil.max_residual, std::abs(hilbert_transform_closed_form(cm, xi) -
                                                               discrete_hilbert_transform(cm.measure(), xi)));
      }
      ++hil.instances;
    }
    const double w2 = std::abs(hilbert_transform_closed_form(clark_measure(BlaschkeProduct::monomial(2), 1.0), CirclePoint(0.0)) - 0.25);
    const double w4 = std::abs(hilbert_transform_closed_form(clark_measure(BlaschkeProduct::monomial(4), 1.0), CirclePoint(0.0)) - 0.375);
    hil.max_residual = std::max({hil.max_residual, w2, w4});
    hil.instances += 2;
  }
  {
    auto& uni = add("clark_unitarity", 1e-8);
    for (int i = 0; i < 20; ++i) {
      auto rng = rng_for(3, i);
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 8), rng.unimodular());
      std::vector<cplx> f(cm.measure().size());
      double l2 = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        f[j] = rng.normal();
        l2 += std::norm(f[j]) * cm.measure().mass(j);
      }
      l2 = std::sqrt(l2);
      uni.max_residual = std::max(uni.max_residual, std::abs(l2_norm_circle(ModelSpaceFunction(cm, f), grid) - l2) / l2);
      ++uni.instances;
    }
  }
  {
    auto& con = add("contour_arc_mean", 1e-6);
    for (int i = 0; i < 20; ++i) {
      auto rng = rng_for(4, i);
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 6), rng.unimodular());
      std::vector<cplx> f(cm.measure().size());
      double scale = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        f[j] = rng.normal();
        scale += std::abs(f[j]) * cm.measure().mass(j);
      }
      const Arc arc = random_arc_avoiding(rng, cm.measure(), 1e-3);
      cplx direct = 0.0;
      for (auto j : atoms_in_arc(cm.measure(), arc)) direct += f[j] * cm.measure().mass(j);
      const cplx viac = arc_mean_via_contour(cm, SampledFunction(cm.base, f), arc);
      con.max_residual = std::max(con.max_residual, std::abs(viac - direct) / std::max(std::abs(direct), scale));
      ++con.instances;
    }
    const auto cm2 = clark_measure(BlaschkeProduct::monomial(2), 1.0);
    const cplx pinned = arc_mean_via_contour(cm2, SampledFunction(cm2.base, {1.0, -1.0}), Arc(CirclePoint(-0.5), 1.0));
    con.max_residual = std::max(con.max_residual, std::abs(pinned - 0.5) / 0.5);
    ++con.instances;
  }
  {
    auto& dis = add("disintegration", 1e-6);
    for (int i = 0; i < 5; ++i) {
      auto rng = rng_for(5, i);
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 4), rng.unimodular());
      std::vector<cplx> f(cm.measure().size());
      for (auto& v : f) v = rng.normal();
      dis.max_residual = std::max(dis.max_residual, aleksandrov_disintegration_check(ModelSpaceFunction(cm, f), 256, grid));
      ++dis.instances;
    }
  }
  {
    auto& eq = add("toeplitz_hankel_singular_values", 1e-8);
    for (int i = 0; i < 10; ++i) {
      auto rng = rng_for(6, i);
      const auto theta = random_theta(rng, 1 + static_cast<std::size_t>(i) % 6);
      const cplx alpha = rng.unimodular();
      std::vector<cplx> c(9);
      for (auto& x : c) x = rng.normal();
      std::vector<cplx> psi(grid.size()), phi(grid.size());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const cplx z = grid.node(g);
        cplx s = 0.0;
        for (int m = -4; m <= 4; ++m) s += c[static_cast<std::size_t>(m + 4)] * std::pow(z, m);
        psi[g] = s;
        phi[g] = std::conj(theta(z)) * s;
      }
      const auto a = singular_values(truncated_toeplitz_matrix(theta, alpha, psi, grid).entries);
      const auto b = singular_values(truncated_hankel_matrix_grid(theta, alpha, phi, grid).entries);
      for (std::size_t k = 0; k < a.size(); ++k) eq.max_residual = std::max(eq.max_residual, std::abs(a[k] - b[k]));
      ++eq.instances;
    }
  }
  {
    auto& mono = add("monomial_clark_consistency", 1e-8);
    for (std::size_t n = 1; n <= 6; ++n) {
      auto rng = rng_for(7, static_cast<int>(n));
      std::vector<cplx> gamma(2 * n - 1);
      for (auto& g : gamma) g = rng.normal();
      const auto theta = BlaschkeProduct::monomial(n);
      const auto nu = clark_measure(theta.squared(), 1.0);
      const SampledFunction p(nu.base, classical_symbol_trace(gamma, nu.measure()));
      const auto a = singular_values(truncated_hankel_matrix(theta, 1.0, p, grid).entries);
      const auto b = singular_values(hankel_matrix_classical(gamma).entries);
      for (std::size_t k = 0; k < a.size(); ++k) mono.max_residual = std::max(mono.max_residual, std::abs(a[k] - b[k]));
      ++mono.instances;
    }
  }
  {
    auto& svd = add("svd_vs_power_iteration", 1e-9);
    for (int i = 0; i < 50; ++i) {
      auto rng = rng_for(8, i);
      const auto n = static_cast<Eigen::Index>(1 + rng.below(12));
      CMatrix m(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rng.normal();
      }
      const double s = operator_norm(m);
      svd.max_residual = std::max(svd.max_residual, std::abs(s - power_iteration_norm(m).norm) / s);
      ++svd.instances;
    }
  }
  {
    auto& bmo = add("bmo_fast_vs_naive", 1e-12);
    for (int i = 0; i < 50; ++i) {
      auto rng = rng_for(9, i);
      const auto mu = random_measure(rng, 1 + rng.below(64));
      std::vector<cplx> v(mu->size());
      for (auto& x : v) x = i % 2 == 0 ? cplx(rng.normal().real()) : rng.normal();
      const SampledFunction b(mu, v);
      bmo.max_residual = std::max(bmo.max_residual, std::abs(bmo_norm(b).norm - bmo_norm_naive(b).norm));
      ++bmo.instances;
    }
  }
  return rep;
}

namespace {

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json envelopes_json(const std::vector<RatioEnvelope>& envs) {
  auto a = json::array();
  for (const auto& e : envs) {
    a.push_back({{"key", e.key}, {"min_ratio", e.min_ratio}, {"max_ratio", e.max_ratio}, {"count", e.count},
                 {"skipped", e.skipped}});
  }
  return a;
}

}  // namespace

std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "experiment,n_or_degree,trial,op_norm,bmo_norm,ratio,witness_ref\n";
  for (const auto& row : r.rows) {
    os << row.experiment << ',' << row.n_or_degree << ',' << row.trial << ',' << format_double(row.op_norm) << ','
       << format_double(row.bmo_norm) << ',' << format_double(row.ratio) << ',' << csv_escape(row.witness) << '\n';
  }
  return os.str();
}

std::string to_json(const ExperimentReport& r) {
  json j;
  j["experiment"] = r.experiment;
  j["symbol_distribution"] = "complex standard normal";
  j["envelopes"] = envelopes_json(r.envelopes);
  j["metrics"] = r.metrics;
  j["failures"] = r.failures;
  j["passed"] = r.passed();
  j["rows"] = r.rows.size();
  return j.dump(2);
}

std::string to_json(const IdentityReport& r) {
  json j;
  auto checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"max_residual", c.max_residual}, {"tolerance", c.tolerance},
                      {"instances", c.instances}, {"passed", c.passed()}});
  }
  j["checks"] = std::move(checks);
  j["passed"] = r.passed();
  return j.dump(2);
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no), "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(field, "not a number: " + s);
  }
}

}  // namespace

std::vector<ReportRow> parse_csv_report(std::string_view text) {
  std::vector<ReportRow> rows;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line, line_no);
    if (line_no == 1) {
      if (f.size() != 7 || f[0] != "experiment") throw ParseError("header", "unexpected CSV header");
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    if (f.size() != 7) throw ParseError(where, "expected 7 columns");
    ReportRow r;
    r.experiment = f[0];
    r.n_or_degree = static_cast<std::size_t>(parse_double(f[1], where + ".n_or_degree"));
    r.trial = static_cast<int>(parse_double(f[2], where + ".trial"));
    r.op_norm = parse_double(f[3], where + ".op_norm");
    r.bmo_norm = parse_double(f[4], where + ".bmo_norm");
    r.ratio = parse_double(f[5], where + ".ratio");
    r.witness = f[6];
    rows.push_back(std::move(r));
  }
  return rows;
}

double recompute_ratio(const ReportRow& row) {
  json w;
  try {
    w = json::parse(row.witness);
  } catch (const json::exception& e) {
    throw ParseError("witness_ref", std::string("invalid witness JSON: ") + e.what());
  }
  auto need = [&](const char* key) -> const json& {
    if (!w.contains(key)) throw ParseError(std::string("witness_ref.") + key, "missing field");
    return w[key];
  };
  if (row.experiment == "corollary1") {
    const auto ev = evaluate_corollary1(complex_list(need("gamma"), "gamma"));
    return ev.op / ev.bmo;
  }
  if (row.experiment == "atom-bound") {
    const QuadratureGrid grid(need("grid").get<std::size_t>());
    return atom_l1(need("n").get<std::size_t>(), complex_list(need("values"), "values"), grid);
  }
  if (row.experiment == "theorem3" || row.experiment == "cz-vs-lp") {
    const auto theta = deserialize_blaschke(need("theta").dump());
    const auto a = need("alpha");
    const cplx alpha(a.at(0).get<double>(), a.at(1).get<double>());
    const auto trace = complex_list(need("trace"), "trace");
    const QuadratureGrid grid(need("grid").get<std::size_t>());
    if (row.experiment == "theorem3") {
      const auto ev = evaluate_theorem3(theta, alpha, trace, grid);
      return ev.op / ev.bmo;
    }
    const auto cm = clark_measure(theta, alpha);
    const double tw = cz_decompose(SampledFunction(cm.base, trace)).total_weight;
    return tw / l1_norm_circle(ModelSpaceFunction(cm, trace), grid);
  }
  throw ParseError("experiment", "unknown experiment " + row.experiment);
}

VerifyResult verify_report(std::string_view csv, int count, std::uint64_t seed, double tol) {
  const auto rows = parse_csv_report(csv);
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  TrialRng rng(seed, kVerify, 0);
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  idx.resize(std::min(idx.size(), static_cast<std::size_t>(std::max(count, 0))));
  std::sort(idx.begin(), idx.end());
  VerifyResult out;
  for (auto i : idx) {
    const auto& row = rows[i];
    const double again = recompute_ratio(row);
    const double dev = std::abs(again - row.ratio) / std::max(1.0, std::abs(row.ratio));
    out.max_deviation = std::max(out.max_deviation, dev);
    ++out.checked;
    if (!(dev <= tol)) {
      out.failures.push_back(row.experiment + " " + std::to_string(row.n_or_degree) + " trial " +
                             std::to_string(row.trial) + ": stored " + format_double(row.ratio) + ", recomputed " +
                             format_double(again));
    }
  }
  return out;
}

}  // namespace clarkbmo
