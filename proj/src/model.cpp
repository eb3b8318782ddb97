#include "clarkbmo/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "clarkbmo/error.hpp"

namespace clarkbmo {

QuadratureGrid::QuadratureGrid(std::size_t m) {
  if (m < 2 || (m & (m - 1)) != 0) throw Error("grid size must be a power of two >= 2");
  nodes_.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    nodes_.push_back(std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(m)));
  }
}

cplx QuadratureGrid::integrate(const std::vector<cplx>& values) const {
  if (values.size() != nodes_.size()) throw Error("grid value count mismatch");
  cplx s = 0.0;
  for (const auto& v : values) s += v;
  return s * weight();
}

ModelSpaceFunction::ModelSpaceFunction(ClarkMeasure cm, std::vector<cplx> trace)
    : cm_(std::move(cm)), trace_(std::move(trace)) {
  if (trace_.size() != cm_.measure().size()) {
    throw Error("trace has " + std::to_string(trace_.size()) + " values for " +
                std::to_string(cm_.measure().size()) + " atoms");
  }
}

cplx ModelSpaceFunction::kernel(std::size_t j, cplx z, cplx theta_z) const {
  const cplx xi = cm_.measure().atom(j).value();
  if (std::abs(z - xi) < 1e-2) {
    return std::conj(cm_.alpha) * xi * cm_.theta.divided_difference(z, xi);
  }
  return (1.0 - std::conj(cm_.alpha) * theta_z) / (1.0 - std::conj(xi) * z);
}

cplx ModelSpaceFunction::kernel(std::size_t j, cplx z) const { return kernel(j, z, cm_.theta(z)); }

cplx ModelSpaceFunction::operator()(cplx z) const {
  const cplx tz = cm_.theta(z);
  cplx s = 0.0;
  for (std::size_t j = 0; j < trace_.size(); ++j) {
    if (trace_[j] == 0.0) continue;
    s += trace_[j] * cm_.measure().mass(j) * kernel(j, z, tz);
  }
  return s;
}

std::vector<cplx> ModelSpaceFunction::on_grid(const QuadratureGrid& grid) const {
  std::vector<cplx> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = (*this)(grid.node(k));
  return out;
}

cplx embed_inverse(const ClarkMeasure& cm, const SampledFunction& f, cplx z) {
  if (f.size() != cm.measure().size()) throw Error("trace does not live on the Clark atoms");
  return ModelSpaceFunction(cm, f.values())(z);
}

double l2_norm_circle(const ModelSpaceFunction& f, const QuadratureGrid& grid) {
  double s = 0.0;
  for (const auto& v : f.on_grid(grid)) s += std::norm(v);
  return std::sqrt(s * grid.weight());
}

double l1_norm_circle(const ModelSpaceFunction& f, const QuadratureGrid& grid) {
  double s = 0.0;
  for (const auto& v : f.on_grid(grid)) s += std::abs(v);
  return s * grid.weight();
}

double aleksandrov_disintegration_check(const ModelSpaceFunction& f, std::size_t beta_count,
                                        const QuadratureGrid& grid) {
  if (beta_count < 8) throw Error("beta_count must be at least 8");
  const auto& theta = f.clark().theta;
  double fibres = 0.0;
  for (std::size_t b = 0; b < beta_count; ++b) {
    const cplx beta = std::polar(1.0, kTwoPi * static_cast<double>(b) / static_cast<double>(beta_count));
    const auto sb = clark_measure(theta, beta);
    for (std::size_t k = 0; k < sb.measure().size(); ++k) {
      fibres += std::abs(f(sb.measure().atom(k).value())) * sb.measure().mass(k);
    }
  }
  fibres /= static_cast<double>(beta_count);
  return std::abs(l1_norm_circle(f, grid) - fibres);
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece gauss_kronrod(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx k = kWgk[7] * fc;
  cplx g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const cplx s = f(c - h * kXgk[i]) + f(c + h * kXgk[i]);
    k += kWgk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

/// Globally adaptive: always bisect the piece with the largest error estimate.
template <class F>
cplx integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_pieces) {
  // Start from a uniform split so a peak cannot hide between the first 15 nodes.
  constexpr int kInitial = 16;
  std::priority_queue<Piece> queue;
  double total_err = 0.0;
  for (int i = 0; i < kInitial; ++i) {
    const Piece p = gauss_kronrod(f, a + (b - a) * i / kInitial, a + (b - a) * (i + 1) / kInitial);
    total_err += p.error;
    queue.push(p);
  }
  int pieces = kInitial;
  while (total_err > abs_tol && pieces < max_pieces) {
    const Piece p = queue.top();
    queue.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      queue.push(p);
      break;
    }
    const Piece l = gauss_kronrod(f, p.a, m), r = gauss_kronrod(f, m, p.b);
    total_err += l.error + r.error - p.error;
    queue.push(l);
    queue.push(r);
    ++pieces;
  }
  cplx s = 0.0;
  while (!queue.empty()) {
    s += queue.top().value;
    queue.pop();
  }
  return s;
}

}  // namespace

cplx arc_mean_via_contour(const ClarkMeasure& cm, const SampledFunction& f, const Arc& arc,
                          const ContourOptions& opts) {
  const auto& mu = cm.measure();
  if (f.size() != mu.size()) throw Error("trace does not live on the Clark atoms");
  if (!(opts.radial_offset > 0.0 && opts.radial_offset < 1.0)) throw Error("radial offset must lie in (0, 1)");
  if (!arc.is_full()) {
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (mu.atom(k).chord(arc.start()) < opts.atom_clearance ||
          mu.atom(k).chord(arc.end()) < opts.atom_clearance) {
        throw Error("contour too close to atom");
      }
    }
  }
  const ModelSpaceFunction F(cm, f.values());
  const cplx ac = std::conj(cm.alpha);
  auto h = [&](cplx z) {
    const cplx tz = cm.theta(z);
    cplx fz = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) fz += f[j] * mu.mass(j) * F.kernel(j, z, tz);
    return fz / (z * (1.0 - ac * tz));
  };
  double scale = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) scale += std::abs(f[j]) * mu.mass(j);
  if (scale == 0.0) return 0.0;
  const double tol = opts.tolerance * scale;
  const int max_pieces = opts.max_pieces;
  const double r_out = 1.0 + opts.radial_offset, r_in = 1.0 - opts.radial_offset;
  const cplx I(0.0, 1.0);

  auto circle = [&](double radius, double t0, double t1) {
    return integrate_adaptive(
        [&](double t) {
          const cplx z = std::polar(radius, t);
          return h(z) * I * z;
        },
        t0, t1, tol, max_pieces);
  };
  auto radial = [&](double angle, double rho0, double rho1) {
    const cplx dir = std::polar(1.0, angle);
    return integrate_adaptive([&](double rho) { return h(rho * dir) * dir; }, rho0, rho1, tol, max_pieces);
  };

  cplx total;
  if (arc.is_full()) {
    total = circle(r_out, 0.0, kTwoPi) - circle(r_in, 0.0, kTwoPi);
  } else {
    const double t0 = arc.start().angle();
    const double t1 = t0 + arc.extent();
    total = circle(r_out, t0, t1) + radial(t1, r_out, r_in) - circle(r_in, t0, t1) + radial(t0, r_in, r_out);
  }
  return -total / (kTwoPi * I);
}

Symmetrization symmetrize(const ModelSpaceFunction& f, const QuadratureGrid& grid) {
  const auto& cm = f.clark();
  const std::size_t n = f.trace().size();
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) scale += std::abs(f.trace()[j]) * cm.measure().mass(j);
  if (std::abs(f(0.0)) > 1e-9 * std::max(scale, 1e-300)) throw Error("symmetrization needs F(0) = 0");

  std::vector<cplx> t1(n), t2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx v = f.trace()[j];
    const cplx reflected = cm.alpha * std::conj(v);
    t1[j] = 0.5 * (v + reflected);
    t2[j] = (v - reflected) / cplx(0.0, 2.0);
  }
  Symmetrization out{ModelSpaceFunction(cm, t1), ModelSpaceFunction(cm, t2)};

  const auto fg = f.on_grid(grid);
  const auto g1 = out.g1.on_grid(grid);
  const auto g2 = out.g2.on_grid(grid);
  double sup = 0.0, res = 0.0, l1f = 0.0, l1a = 0.0, l1b = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cplx th = cm.theta(grid.node(k));
    const cplx gt = th * std::conj(fg[k]);
    res = std::max({res, std::abs(g1[k] - 0.5 * (fg[k] + gt)), std::abs(g2[k] - (fg[k] - gt) / cplx(0.0, 2.0)),
                    std::abs(g1[k] - th * std::conj(g1[k])), std::abs(g2[k] - th * std::conj(g2[k]))});
    sup = std::max(sup, std::abs(fg[k]));
    l1f += std::abs(fg[k]);
    l1a += std::abs(g1[k]);
    l1b += std::abs(g2[k]);
  }
  out.identity_residual = res;
  out.l1_f = l1f * grid.weight();
  out.l1_g1 = l1a * grid.weight();
  out.l1_g2 = l1b * grid.weight();
  if (res > 1e-9 * std::max(1.0, sup)) throw Error("symmetrization identity failed on the grid");
  if (out.l1_g1 > out.l1_f + 1e-9 || out.l1_g2 > out.l1_f + 1e-9) {
    throw Error("symmetrized part exceeds the L1 norm of F");
  }
  return out;
}

}  // namespace clarkbmo
