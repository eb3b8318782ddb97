#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "clarkbmo/atomic.hpp"
#include "clarkbmo/bmo.hpp"
#include "clarkbmo/harness.hpp"
#include "clarkbmo/operators.hpp"

using namespace clarkbmo;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > time_limit_s) {
    out.ok = false;
    out.detail += "; runtime " + num(secs) + " s over " + num(time_limit_s) + " s";
  }
  std::printf("%s [%2d] %s: %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
  if (!out.ok) ++failures;
}

BlaschkeProduct random_theta(TrialRng& rng, std::size_t degree) {
  std::vector<cplx> zeros(degree);
  for (auto& a : zeros) a = rng.in_disk(0.8);
  const cplx g = rng.unimodular();
  return BlaschkeProduct(std::move(zeros), g);
}

std::vector<cplx> normals(TrialRng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<cplx> zero_mean(TrialRng& rng, const DiscreteMeasure& mu, bool real_only) {
  auto v = normals(rng, mu.size());
  cplx m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (real_only) v[i] = v[i].real();
    m += v[i] * mu.mass(i);
  }
  for (auto& x : v) x -= m / mu.total_mass();
  return v;
}

MeasurePtr random_measure(TrialRng& rng, std::size_t n) {
  std::vector<double> angles;
  while (angles.size() < n) {
    const double a = kTwoPi * rng.uniform();
    bool ok = true;
    for (double b : angles) ok = ok && std::min(std::abs(a - b), kTwoPi - std::abs(a - b)) > 1e-3;
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

/// Haar-measure trace of sum gamma_m conj(xi)^(m+1).
std::vector<cplx> haar_symbol(const std::vector<cplx>& gamma, const DiscreteMeasure& mu) {
  std::vector<cplx> p(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t m = 0; m < gamma.size(); ++m) {
      p[i] += gamma[m] * std::pow(std::conj(mu.atom(i).value()), static_cast<int>(m + 1));
    }
  }
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  criterion(1, "Clark atoms of z^n are the n-th roots of alpha with mass 1/n", 1.0, [] {
    double worst = 0.0;
    for (std::size_t n = 1; n <= 64; ++n) {
      for (double phase : {0.0, 1.0, 2.5, 4.0}) {
        const cplx alpha = std::polar(1.0, phase);
        const auto cm = clark_measure(BlaschkeProduct::monomial(n), alpha);
        if (cm.measure().size() != n) return Outcome{false, "wrong atom count at n=" + std::to_string(n)};
        for (std::size_t k = 0; k < n; ++k) {
          // Some root of alpha equals this atom; compare against the nearest one.
          const double a = cm.measure().atom(k).angle();
          const double j = std::round((a * n - phase) / kTwoPi);
          const cplx root = std::polar(1.0, (phase + kTwoPi * j) / static_cast<double>(n));
          worst = std::max({worst, std::abs(cm.measure().atom(k).value() - root),
                            std::abs(cm.measure().mass(k) - 1.0 / static_cast<double>(n))});
        }
      }
    }
    return Outcome{worst <= 1e-11, "max error " + num(worst)};
  });

  criterion(2, "Herglotz, Cauchy and Hilbert closed-form identities", 10.0, [] {
    double herglotz = 0.0, cauchy = 0.0, hilbert = 0.0;
    for (int i = 0; i < 50; ++i) {
      TrialRng rng(2, 0, static_cast<std::uint64_t>(i));
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 6), rng.unimodular());
      const cplx z = rng.in_disk(0.9);
      herglotz = std::max(herglotz, verify_herglotz(cm, z));
      cauchy = std::max(cauchy, verify_cauchy_identity(cm, z));
      for (const auto& xi : cm.measure().atoms()) {
        hilbert = std::max(hilbert, std::abs(hilbert_transform_closed_form(cm, xi) - discrete_hilbert_transform(cm.measure(), xi)));
      }
    }
    const auto z2 = clark_measure(BlaschkeProduct::monomial(2), 1.0);
    const auto z4 = clark_measure(BlaschkeProduct::monomial(4), 1.0);
    const double w2 = std::abs(hilbert_transform_closed_form(z2, CirclePoint(0.0)) - 0.25);
    const double w4 = std::abs(hilbert_transform_closed_form(z4, CirclePoint(0.0)) - 0.375);
    const double w2d = std::abs(discrete_hilbert_transform(z2.measure(), CirclePoint(0.0)) - 0.25);
    const double w4d = std::abs(discrete_hilbert_transform(z4.measure(), CirclePoint(0.0)) - 0.375);
    const double worst = std::max({herglotz, cauchy, hilbert, w2, w4, w2d, w4d});
    return Outcome{worst <= 1e-9, "herglotz " + num(herglotz) + ", cauchy " + num(cauchy) + ", hilbert " + num(hilbert) +
                                      ", witnesses " + num(std::max({w2, w4, w2d, w4d}))};
  });

  criterion(3, "Clark unitarity on the 4096-point grid", 30.0, [] {
    const QuadratureGrid grid(4096);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      TrialRng rng(3, 0, static_cast<std::uint64_t>(i));
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 8), rng.unimodular());
      const auto f = normals(rng, cm.measure().size());
      double l2 = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) l2 += std::norm(f[j]) * cm.measure().mass(j);
      l2 = std::sqrt(l2);
      worst = std::max(worst, std::abs(l2_norm_circle(ModelSpaceFunction(cm, f), grid) - l2) / l2);
    }
    return Outcome{worst <= 1e-8, "max relative error " + num(worst)};
  });

  criterion(4, "contour arc means equal atom sums", 60.0, [] {
    const auto z2 = clark_measure(BlaschkeProduct::monomial(2), 1.0);
    const double pinned = std::abs(arc_mean_via_contour(z2, SampledFunction(z2.base, {1.0, -1.0}), Arc(CirclePoint(-0.5), 1.0)) - 0.5);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      TrialRng rng(4, 0, static_cast<std::uint64_t>(i));
      const auto cm = clark_measure(random_theta(rng, 1 + static_cast<std::size_t>(i) % 6), rng.unimodular());
      const auto f = normals(rng, cm.measure().size());
      Arc arc = Arc::full_circle();
      for (;;) {
        arc = Arc(CirclePoint(kTwoPi * rng.uniform()), kTwoPi * rng.uniform());
        bool clear = true;
        for (const auto& a : cm.measure().atoms()) {
          for (const auto& e : {arc.start(), arc.end()}) clear = clear && std::min(a.ccw_to(e), e.ccw_to(a)) >= 1e-3;
        }
        if (clear) break;
      }
      cplx direct = 0.0;
      double scale = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        scale += std::abs(f[j]) * cm.measure().mass(j);
        if (arc.start().ccw_to(cm.measure().atom(j)) <= arc.extent()) direct += f[j] * cm.measure().mass(j);
      }
      const cplx v = arc_mean_via_contour(cm, SampledFunction(cm.base, f), arc);
      worst = std::max(worst, std::abs(v - direct) / std::max(std::abs(direct), scale));
    }
    return Outcome{worst <= 1e-6 && pinned <= 1e-6 * 0.5,
                   "max relative error " + num(worst) + ", single-atom witness error " + num(pinned)};
  });

  criterion(5, "Haar-measure Hankel/BMO ratios stay in [1/90, 1e7 M]", 120.0, [] {
    ExperimentConfig cfg;
    cfg.seed = 5;
    cfg.trials = 200;
    cfg.n_values = {1, 2, 4, 8, 16};
    const auto rep = run_corollary1(cfg);
    auto ratio = [](std::vector<cplx> gamma) {
      const std::size_t n = (gamma.size() + 1) / 2;
      auto mu = std::make_shared<const DiscreteMeasure>(DiscreteMeasure::haar_roots(2 * n));
      return operator_norm(hankel_matrix_classical(gamma).entries) / bmo_norm(SampledFunction(mu, haar_symbol(gamma, *mu))).norm;
    };
    const double w1 = std::abs(ratio({1.0}) - 1.0), w2 = std::abs(ratio({0.0, 1.0, 0.0}) - 1.0);
    const double spread = rep.metrics.at("cross_n_spread");
    std::size_t rows = rep.rows.size();
    const bool ok = rep.passed() && rows == 1000 && w1 < 1e-12 && w2 < 1e-12 && spread <= 100.0;
    double lo = 1e300, hi = 0.0;
    for (const auto& e : rep.envelopes) {
      lo = std::min(lo, e.min_ratio);
      hi = std::max(hi, e.max_ratio);
    }
    return Outcome{ok, std::to_string(rows) + " ratios in [" + num(lo) + ", " + num(hi) + "], spread " + num(spread) +
                           ", witnesses off by " + num(std::max(w1, w2))};
  });

  criterion(6, "extended atoms have L1 norm below 15 and vanish at 0", 60.0, [] {
    ExperimentConfig cfg;
    cfg.seed = 6;
    cfg.trials = 100;
    cfg.n_values = {2, 4, 8};
    const auto rep = run_atom_extension_bound(cfg);
    const bool ok = rep.passed() && rep.rows.size() == 300;
    return Outcome{ok, "max L1 " + num(rep.metrics.at("max_l1")) + ", max |F(0)| " + num(rep.metrics.at("max_abs_F0"))};
  });

  criterion(7, "CZ decomposition and LP bracket", 120.0, [] {
    double recon = 0.0;
    bool lp_ok = true;
    int atoms = 0;
    for (int i = 0; i < 50; ++i) {
      TrialRng rng(7, 0, static_cast<std::uint64_t>(i));
      const auto mu = random_measure(rng, 2 + rng.below(15));
      const SampledFunction f(mu, zero_mean(rng, *mu, i % 2 == 0));
      const auto d = cz_decompose(f);
      const auto back = d.reconstruct(mu->size());
      for (std::size_t k = 0; k < back.size(); ++k) recon = std::max(recon, std::abs(back[k] - f[k]));
      for (const auto& t : d.terms) {
        t.atom.validate(*mu);
        ++atoms;
      }
      const auto lp = atomic_norm_lp(f);
      lp_ok = lp_ok && lp.lower <= d.total_weight * (1.0 + 1e-9) && lp.lower <= lp.upper * (1.0 + 1e-9);
    }
    auto mu2 = std::make_shared<const DiscreteMeasure>(DiscreteMeasure::haar_roots(2));
    const SampledFunction w(mu2, {1.0, -1.0});
    const auto lpw = atomic_norm_lp(w);
    const double wit = std::max({std::abs(cz_decompose(w).total_weight - 1.0), std::abs(lpw.lower - 1.0), std::abs(lpw.upper - 1.0)});
    return Outcome{recon <= 1e-10 && lp_ok && wit <= 1e-9,
                   "reconstruction " + num(recon) + ", " + std::to_string(atoms) + " atoms valid, LP lower <= CZ weight " +
                       (lp_ok ? "everywhere" : "violated") + ", witness error " + num(wit)};
  });

  criterion(8, "operator plumbing: Toeplitz/Hankel, bases, SVD vs power iteration", 60.0, [] {
    const QuadratureGrid grid;
    double eq = 0.0, mono = 0.0, svd = 0.0;
    for (int i = 0; i < 10; ++i) {
      TrialRng rng(8, 0, static_cast<std::uint64_t>(i));
      const auto theta = random_theta(rng, 1 + static_cast<std::size_t>(i) % 6);
      const cplx alpha = rng.unimodular();
      const auto c = normals(rng, 9);
      std::vector<cplx> psi(grid.size()), phi(grid.size());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const cplx z = grid.node(g);
        for (int m = -4; m <= 4; ++m) psi[g] += c[static_cast<std::size_t>(m + 4)] * std::pow(z, m);
        phi[g] = std::conj(theta(z)) * psi[g];
      }
      const auto a = singular_values(truncated_toeplitz_matrix(theta, alpha, psi, grid).entries);
      const auto b = singular_values(truncated_hankel_matrix_grid(theta, alpha, phi, grid).entries);
      for (std::size_t k = 0; k < a.size(); ++k) eq = std::max(eq, std::abs(a[k] - b[k]));
    }
    for (std::size_t n = 1; n <= 6; ++n) {
      TrialRng rng(8, 1, n);
      const auto gamma = normals(rng, 2 * n - 1);
      const auto theta = BlaschkeProduct::monomial(n);
      const auto nu = clark_measure(theta.squared(), 1.0);
      const auto a = singular_values(truncated_hankel_matrix(theta, 1.0, SampledFunction(nu.base, haar_symbol(gamma, nu.measure())), grid).entries);
      const auto b = singular_values(hankel_matrix_classical(gamma).entries);
      for (std::size_t k = 0; k < a.size(); ++k) mono = std::max(mono, std::abs(a[k] - b[k]));
    }
    for (int i = 0; i < 50; ++i) {
      TrialRng rng(8, 2, static_cast<std::uint64_t>(i));
      const auto n = static_cast<Eigen::Index>(1 + rng.below(16));
      CMatrix m(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index k = 0; k < n; ++k) m(r, k) = rng.normal();
      }
      const double s = operator_norm(m);
      svd = std::max(svd, std::abs(s - power_iteration_norm(m).norm) / s);
    }
    return Outcome{eq <= 1e-8 && mono <= 1e-8 && svd <= 1e-9,
                   "Toeplitz/Hankel " + num(eq) + ", Clark vs monomial " + num(mono) + ", SVD vs power " + num(svd)};
  });

  criterion(9, "fast BMO equals brute-force enumeration", 60.0, [] {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      TrialRng rng(9, 0, static_cast<std::uint64_t>(i));
      const auto mu = random_measure(rng, 1 + rng.below(64));
      auto v = normals(rng, mu->size());
      if (i % 2 == 0) {
        for (auto& x : v) x = x.real();
      }
      const SampledFunction b(mu, v);
      worst = std::max(worst, std::abs(bmo_norm(b).norm - bmo_norm_naive(b).norm));
    }
    return Outcome{worst <= 1e-12, "max difference " + num(worst)};
  });

  criterion(10, "corollary1 CSV is byte-identical across runs", 60.0, [&cli] {
    if (cli.empty()) return Outcome{false, "CLI path not given"};
    const std::string a = "acceptance_run_a.csv", b = "acceptance_run_b.csv";
    for (const auto& out : {a, b}) {
      const std::string cmd = cli + " corollary1 --seed 42 --trials 50 --format csv --out " + out;
      if (std::system(cmd.c_str()) != 0) return Outcome{false, "command failed: " + cmd};
    }
    const auto x = slurp(a), y = slurp(b);
    std::remove(a.c_str());
    std::remove(b.c_str());
    return Outcome{!x.empty() && x == y, std::to_string(x.size()) + " bytes, " + (x == y ? "identical" : "different")};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
