#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "clarkbmo/error.hpp"
#include "clarkbmo/model.hpp"
#include "clarkbmo/operators.hpp"
#include "oracles.hpp"

using namespace clarkbmo;

namespace {

std::vector<cplx> random_trace(std::mt19937_64& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = oracle::random_normal(rng);
  return v;
}

/// Direct evaluation of the inverse embedding with the plain product formula for theta.
cplx direct_inverse(const ClarkMeasure& cm, const std::vector<cplx>& f, cplx z) {
  const cplx t = oracle::blaschke_value(cm.theta.zeros(), cm.theta.gamma(), z);
  cplx s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const cplx xi = cm.measure().atom(j).value();
    s += f[j] * cm.measure().mass(j) * (1.0 - std::conj(cm.alpha) * t) / (1.0 - std::conj(xi) * z);
  }
  return s;
}

/// Angular distance between two angles.
double angular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

Arc random_arc_avoiding(std::mt19937_64& rng, const DiscreteMeasure& mu, double clearance) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (;;) {
    const double start = u(rng), extent = u(rng);
    bool ok = true;
    for (const auto& a : mu.atoms()) {
      ok = ok && angular_gap(a.angle(), start) >= clearance && angular_gap(a.angle(), start + extent) >= clearance;
    }
    if (ok) return Arc(CirclePoint(start), extent);
  }
}

/// Sum of f sigma over atoms whose ccw offset from the arc start is within the extent.
cplx direct_arc_sum(const DiscreteMeasure& mu, const std::vector<cplx>& f, const Arc& arc) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double off = std::fmod(mu.atom(j).angle() - arc.start().angle() + 2.0 * kTwoPi, kTwoPi);
    if (off <= arc.extent()) s += f[j] * mu.mass(j);
  }
  return s;
}

std::vector<cplx> grid_values(const QuadratureGrid& grid, const std::function<cplx(cplx)>& f) {
  std::vector<cplx> v(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) v[g] = f(grid.node(g));
  return v;
}

/// Random trigonometric polynomial with modes -d..d.
std::function<cplx(cplx)> random_trig(std::mt19937_64& rng, int d) {
  std::vector<cplx> c(2 * d + 1);
  for (auto& x : c) x = oracle::random_normal(rng);
  return [c, d](cplx z) {
    cplx s = 0.0;
    for (int m = -d; m <= d; ++m) s += c[m + d] * std::pow(z, m);
    return s;
  };
}

std::vector<double> sorted_sv(const CMatrix& m) { return singular_values(m); }

}  // namespace

TEST_CASE("quadrature integrates monomials exactly below the grid size") {
  const QuadratureGrid grid(64);
  for (int k = -63; k <= 63; ++k) {
    const auto v = grid_values(grid, [k](cplx z) { return std::pow(z, k); });
    CHECK(std::abs(grid.integrate(v) - (k == 0 ? 1.0 : 0.0)) < 1e-13);
  }
  CHECK_THROWS_AS(QuadratureGrid(100), Error);
}

TEST_CASE("inverse embedding examples") {
  const auto cm = clark_measure(BlaschkeProduct::monomial(2), 1.0);
  const ModelSpaceFunction f(cm, {1.0, -1.0});
  for (cplx z : {cplx(0.3, 0.1), cplx(-0.5, 0.7), cplx(2.0, 1.0), cplx(0.0, 1.0)}) {
    CHECK(std::abs(f(z) - z) < 1e-14);
  }
  // theta(0) = 0 and f = 1 give F = 1.
  std::mt19937_64 rng(3);
  std::vector<cplx> zeros{0.0, oracle::random_in_disk(rng, 0.8), oracle::random_in_disk(rng, 0.8)};
  const auto cm3 = clark_measure(BlaschkeProduct(zeros, oracle::random_unimodular(rng)), oracle::random_unimodular(rng));
  const ModelSpaceFunction one(cm3, std::vector<cplx>(3, 1.0));
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.9, 0.0), cplx(0.6, -0.6)}) CHECK(std::abs(one(z) - 1.0) < 1e-12);
  // Indicator of one atom gives its Clark kernel.
  const ModelSpaceFunction ind(cm3, {0.0, 1.0, 0.0});
  const cplx z(0.2, -0.4);
  CHECK(std::abs(ind(z) - direct_inverse(cm3, {0.0, 1.0, 0.0}, z)) < 1e-13);
  CHECK(std::abs(embed_inverse(cm3, SampledFunction(cm3.base, {0.0, 1.0, 0.0}), z) - ind(z)) < 1e-15);
}

TEST_CASE("inverse embedding matches the direct formula and reproduces the trace at atoms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cm = clark_measure(oracle::random_blaschke(rng, 1 + trial % 8), oracle::random_unimodular(rng));
    const auto f = random_trace(rng, cm.measure().size());
    const ModelSpaceFunction F(cm, f);
    const cplx z = oracle::random_in_disk(rng, 0.95);
    CHECK(std::abs(F(z) - direct_inverse(cm, f, z)) < 1e-9 * (1.0 + std::abs(F(z))));
    for (std::size_t j = 0; j < f.size(); ++j) {
      CHECK(std::abs(F(cm.measure().atom(j).value()) - f[j]) < 1e-8);
      // Radial limit from inside.
      CHECK(std::abs(F(0.999999 * cm.measure().atom(j).value()) - f[j]) < 1e-4 * (1.0 + std::abs(f[j])));
    }
  }
}

TEST_CASE("Clark unitarity on random instances") {
  std::mt19937_64 rng(11);
  const QuadratureGrid grid;
  for (int trial = 0; trial < 20; ++trial) {
    const auto cm = clark_measure(oracle::random_blaschke(rng, 1 + trial % 8), oracle::random_unimodular(rng));
    const auto f = random_trace(rng, cm.measure().size());
    double l2 = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) l2 += std::norm(f[j]) * cm.measure().mass(j);
    l2 = std::sqrt(l2);
    CHECK(std::abs(l2_norm_circle(ModelSpaceFunction(cm, f), grid) - l2) <= 1e-8 * l2);
  }
}

TEST_CASE("circle norms: F = z and normalized kernels") {
  const auto cm = clark_measure(BlaschkeProduct::monomial(2), 1.0);
  const ModelSpaceFunction f(cm, {1.0, -1.0});
  CHECK(l2_norm_circle(f, QuadratureGrid()) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(l1_norm_circle(f, QuadratureGrid()) == doctest::Approx(1.0).epsilon(1e-13));

  std::mt19937_64 rng(5);
  const auto cm5 = clark_measure(oracle::random_blaschke(rng, 5), oracle::random_unimodular(rng));
  for (std::size_t j = 0; j < 5; ++j) {
    std::vector<cplx> e(5, 0.0);
    e[j] = 1.0;
    CHECK(l2_norm_circle(ModelSpaceFunction(cm5, e), QuadratureGrid()) ==
          doctest::Approx(std::sqrt(cm5.measure().mass(j))).epsilon(1e-8));
  }
}

TEST_CASE("grid refinement leaves circle norms unchanged") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cm = clark_measure(oracle::random_blaschke(rng, 1 + trial % 8), oracle::random_unimodular(rng));
    const ModelSpaceFunction F(cm, random_trace(rng, cm.measure().size()));
    CHECK(std::abs(l2_norm_circle(F, QuadratureGrid(2048)) - l2_norm_circle(F, QuadratureGrid(4096))) < 1e-10);
    CHECK(std::abs(l1_norm_circle(F, QuadratureGrid(2048)) - l1_norm_circle(F, QuadratureGrid(4096))) < 1e-10);
  }
}

TEST_CASE("disintegration over the alpha family") {
  const auto cm = clark_measure(BlaschkeProduct::monomial(2), 1.0);
  CHECK(aleksandrov_disintegration_check(ModelSpaceFunction(cm, {1.0, -1.0}), 16) < 1e-12);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto cm3 = clark_measure(oracle::random_blaschke(rng, 1 + trial % 4), oracle::random_unimodular(rng));
    const ModelSpaceFunction F(cm3, random_trace(rng, cm3.measure().size()));
    CHECK(aleksandrov_disintegration_check(F, 256) <= 1e-6);
  }
  CHECK_THROWS_AS(aleksandrov_disintegration_check(ModelSpaceFunction(cm, {1.0, -1.0}), 4), Error);
}

TEST_CASE("contour arc means: pinned residue examples") {
  const auto cm = clark_measure(BlaschkeProduct::monomial(2), 1.0);
  const SampledFunction f(cm.base, {1.0, -1.0});
  CHECK(std::abs(arc_mean_via_contour(cm, f, Arc(CirclePoint(-0.5), 1.0)) - 0.5) < 1e-10);
  CHECK(std::abs(arc_mean_via_contour(cm, f, Arc(CirclePoint(0.5), 1.0))) < 1e-10);
  CHECK(std::abs(arc_mean_via_contour(cm, f, Arc(CirclePoint(-0.5), 4.0))) < 1e-10);
  CHECK(std::abs(arc_mean_via_contour(cm, f, Arc::full_circle())) < 1e-10);
  CHECK_THROWS_WITH_AS(arc_mean_via_contour(cm, f, Arc(CirclePoint(1e-8), 1.0)), "contour too close to atom", Error);
}

TEST_CASE("contour arc means agree with direct atom sums") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cm = clark_measure(oracle::random_blaschke(rng, 1 + trial % 6), oracle::random_unimodular(rng));
    const auto f = random_trace(rng, cm.measure().size());
    const Arc arc = random_arc_avoiding(rng, cm.measure(), 1e-3);
    const cplx direct = direct_arc_sum(cm.measure(), f, arc);
    double scale = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) scale += std::abs(f[j]) * cm.measure().mass(j);
    const cplx viac = arc_mean_via_contour(cm, SampledFunction(cm.base, f), arc);
    CHECK(std::abs(viac - direct) <= 1e-6 * std::max(std::abs(direct), scale));
  }
}

TEST_CASE("symmetrization") {
  const auto cm = clark_measure(BlaschkeProduct::monomial(2), 1.0);
  const auto s = symmetrize(ModelSpaceFunction(cm, {1.0, -1.0}));
  for (cplx z : {cplx(0.3, 0.2), cplx(-0.1, 0.8)}) {
    CHECK(std::abs(s.g1(z) - z) < 1e-14);
    CHECK(std::abs(s.g2(z)) < 1e-14);
  }
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto cm4 = clark_measure(oracle::random_blaschke(rng, 4), oracle::random_unimodular(rng));
    const auto f = oracle::zero_mean_values(rng, cm4.measure(), false);
    const auto r = symmetrize(ModelSpaceFunction(cm4, f));
    CHECK(r.identity_residual <= 1e-9);
    CHECK(r.l1_g1 <= r.l1_f + 1e-9);
    CHECK(r.l1_g2 <= r.l1_f + 1e-9);
    // F = G1 + i G2.
    const cplx z = oracle::random_in_disk(rng, 0.9);
    CHECK(std::abs(ModelSpaceFunction(cm4, f)(z) - r.g1(z) - cplx(0.0, 1.0) * r.g2(z)) < 1e-12);
    // Already symmetric input has no second part.
    const auto again = symmetrize(r.g1);
    CHECK(l2_norm_circle(again.g2, QuadratureGrid()) < 1e-12);
  }
  CHECK_THROWS_AS(symmetrize(ModelSpaceFunction(cm, {1.0, 1.0})), Error);
}

TEST_CASE("classical Hankel matrices") {
  CHECK(hankel_matrix_classical({1.0}).entries(0, 0) == cplx(1.0));
  const auto m = hankel_matrix_classical({0.0, 1.0, 0.0}).entries;
  CHECK(m(0, 1) == cplx(1.0));
  CHECK(m(1, 0) == cplx(1.0));
  CHECK(m(0, 0) == cplx(0.0));
  CHECK(operator_norm(hankel_matrix_classical({1.0, 1.0, 1.0}).entries) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(hankel_matrix_classical({1.0, 2.0}), Error);
}

TEST_CASE("operator norm examples") {
  CMatrix a(2, 2);
  a << 1.0, 0.5, 0.5, 1.0 / 3.0;
  CHECK(operator_norm(a) == doctest::Approx(2.0 / 3.0 + std::sqrt(1.0 / 9.0 + 0.25)).epsilon(1e-14));
  CMatrix b(2, 2);
  b << 0.0, 1.0, 1.0, 0.0;
  CHECK(operator_norm(b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Clark-basis Hankel for z^n matches the monomial matrix") {
  std::mt19937_64 rng(29);
  const QuadratureGrid grid;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto theta = BlaschkeProduct::monomial(n);
    const auto nu = clark_measure(theta.squared(), 1.0);
    std::vector<cplx> gamma(2 * n - 1);
    for (auto& g : gamma) g = oracle::random_normal(rng);
    std::vector<cplx> p(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const cplx xi = nu.measure().atom(i).value();
      for (std::size_t m = 0; m < gamma.size(); ++m) p[i] += gamma[m] * std::pow(std::conj(xi), static_cast<int>(m + 1));
    }
    const auto h = truncated_hankel_matrix(theta, 1.0, SampledFunction(nu.base, p), grid);
    const auto a = sorted_sv(h.entries), b = sorted_sv(hankel_matrix_classical(gamma).entries);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-8);
  }
}

TEST_CASE("Clark-basis Hankel is symmetric and vanishes on the zero-symbol class") {
  std::mt19937_64 rng(31);
  const QuadratureGrid grid;
  for (int trial = 0; trial < 8; ++trial) {
    const auto theta = oracle::random_blaschke(rng, 1 + trial % 6);
    const cplx alpha = oracle::random_unimodular(rng);
    const auto nu = clark_measure(theta.squared(), alpha);
    const auto p = oracle::zero_mean_values(rng, nu.measure(), false);
    const auto h = truncated_hankel_matrix(theta, alpha, SampledFunction(nu.base, p), grid).entries;
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    const auto th2 = theta.squared();
    const auto zero = truncated_hankel_matrix_grid(theta, alpha, grid_values(grid, [&](cplx z) { return th2(z); }), grid);
    CHECK(zero.entries.cwiseAbs().maxCoeff() < 1e-8);
  }
  const auto theta = BlaschkeProduct::monomial(3);
  const auto nu = clark_measure(theta.squared(), 1.0);
  const auto h0 = truncated_hankel_matrix(theta, 1.0, SampledFunction(nu.base, std::vector<cplx>(6, 0.0)), grid);
  CHECK(h0.entries.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(truncated_hankel_matrix(theta, 1.0, SampledFunction(nu.base, std::vector<cplx>(6, 1.0)), grid),
                  Error);
}

TEST_CASE("truncated Toeplitz matrices") {
  std::mt19937_64 rng(37);
  const QuadratureGrid grid;
  const auto theta = oracle::random_blaschke(rng, 5);
  const cplx alpha = oracle::random_unimodular(rng);
  const auto id = truncated_toeplitz_matrix(theta, alpha, std::vector<cplx>(grid.size(), 1.0), grid).entries;
  CHECK((id - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);

  for (std::size_t n = 1; n <= 6; ++n) {
    const auto a = truncated_toeplitz_matrix(BlaschkeProduct::monomial(n), oracle::random_unimodular(rng),
                                             grid_values(grid, [](cplx z) { return z; }), grid);
    const auto sv = singular_values(a.entries);
    for (std::size_t k = 0; k + 1 < n; ++k) CHECK(std::abs(sv[k] - 1.0) < 1e-10);
    CHECK(sv.back() < 1e-10);
  }
}

TEST_CASE("Toeplitz and Hankel with the rotated symbol share singular values") {
  std::mt19937_64 rng(41);
  const QuadratureGrid grid;
  for (int trial = 0; trial < 10; ++trial) {
    const auto theta = oracle::random_blaschke(rng, 1 + trial % 6);
    const cplx alpha = oracle::random_unimodular(rng);
    const auto psi = random_trig(rng, 4);
    const auto psi_grid = grid_values(grid, psi);
    const auto phi_grid = grid_values(grid, [&](cplx z) { return std::conj(theta(z)) * psi(z); });
    const auto a = singular_values(truncated_toeplitz_matrix(theta, alpha, psi_grid, grid).entries);
    const auto b = singular_values(truncated_hankel_matrix_grid(theta, alpha, phi_grid, grid).entries);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-8);
  }
}

TEST_CASE("standard symbols") {
  const QuadratureGrid grid;
  const auto theta = BlaschkeProduct::monomial(2);
  const auto raw = grid_values(grid, [](cplx z) { return z * z + std::conj(z); });
  const auto s = standardize_symbol(theta, 1.0, raw, grid);
  REQUIRE(s.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(s[i] - std::conj(s.measure().atom(i).value())) < 1e-12);

  std::mt19937_64 rng(43);
  for (std::size_t n = 1; n <= 5; ++n) {
    // Projection oracle for z^n: keep Fourier modes -1 .. -(2n-1) of a random raw symbol.
    const auto th = BlaschkeProduct::monomial(n);
    const auto raw_fn = random_trig(rng, 3 * static_cast<int>(n));
    const auto rg = grid_values(grid, raw_fn);
    const auto st = standardize_symbol(th, 1.0, rg, grid);
    std::vector<cplx> modes(2 * n);
    for (std::size_t m = 1; m < 2 * n; ++m) {
      for (std::size_t g = 0; g < grid.size(); ++g) modes[m] += rg[g] * std::pow(grid.node(g), static_cast<int>(m));
      modes[m] *= grid.weight();
    }
    for (std::size_t i = 0; i < st.size(); ++i) {
      cplx expect = 0.0;
      for (std::size_t m = 1; m < 2 * n; ++m) expect += modes[m] * std::pow(std::conj(st.measure().atom(i).value()), static_cast<int>(m));
      CHECK(std::abs(st[i] - expect) < 1e-10);
    }
  }

  for (int trial = 0; trial < 5; ++trial) {
    const auto th = oracle::random_blaschke(rng, 1 + trial % 4);
    const cplx alpha = oracle::random_unimodular(rng);
    const auto st = standardize_symbol(th, alpha, grid_values(grid, random_trig(rng, 6)), grid);
    const auto again = standardize_symbol(th, alpha, symbol_grid_from_trace(th, alpha, st, grid), grid);
    for (std::size_t i = 0; i < st.size(); ++i) CHECK(std::abs(again[i] - st[i]) < 1e-9);
    // theta^2 times an analytic polynomial projects to zero.
    const auto th2 = th.squared();
    const auto zero = standardize_symbol(th, alpha, grid_values(grid, [&](cplx z) { return th2(z) * (1.0 + 2.0 * z); }), grid);
    for (std::size_t i = 0; i < zero.size(); ++i) CHECK(std::abs(zero[i]) < 1e-10);
  }
}

TEST_CASE("operator matrix JSON round trip") {
  std::mt19937_64 rng(47);
  OperatorMatrix m;
  m.entries = CMatrix::Random(3, 3);
  const auto back = operator_matrix_from_json(to_json(m));
  CHECK(back.entries == m.entries);
  CHECK_THROWS_AS(operator_matrix_from_json("{\"n\":2,\"entries\":[[1,0]]}"), ParseError);
  try {
    operator_matrix_from_json("{\"n\":1,\"entries\":[[1]]}");
  } catch (const ParseError& e) {
    CHECK(e.field() == "entries[0]");
  }
}
