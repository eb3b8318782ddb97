#include "clarkbmo/bmo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clarkbmo/error.hpp"

namespace clarkbmo {

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0.0) {}
  void reset() { std::fill(tree_.begin(), tree_.end(), 0.0); }
  void add(std::size_t pos, double v) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += v;
  }
  /// Sum over positions [0, count).
  double prefix(std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<double> tree_;
};

bool is_real(const SampledFunction& b) {
  return std::all_of(b.values().begin(), b.values().end(),
                     [](cplx v) { return v.imag() == 0.0; });
}

/// Visits every canonical run as (first, length, mass) with the full circle once.
template <class Visit>
void for_each_run_start(std::size_t n, Visit&& visit) {
  for (std::size_t i = 0; i < n; ++i) visit(i, i == 0 ? n : n - 1);
}

template <class Filter>
BmoResult scan_real(const SampledFunction& b, Filter&& keep) {
  const auto& mu = b.measure();
  const std::size_t n = mu.size();
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = b[k].real();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return x[p] < x[q]; });
  std::vector<std::size_t> rank(n);
  std::vector<double> sorted(n);
  for (std::size_t r = 0; r < n; ++r) {
    rank[order[r]] = r;
    sorted[r] = x[order[r]];
  }

  BmoResult best;
  best.extremal_run = {0, n};
  Fenwick w(n), s(n);
  for_each_run_start(n, [&](std::size_t i, std::size_t max_len) {
    w.reset();
    s.reset();
    double wt = 0.0, st = 0.0;
    for (std::size_t len = 1; len <= max_len; ++len) {
      const std::size_t k = (i + len - 1) % n;
      w.add(rank[k], mu.mass(k));
      s.add(rank[k], mu.mass(k) * x[k]);
      wt += mu.mass(k);
      st += mu.mass(k) * x[k];
      if (!keep(wt)) continue;
      const double m = st / wt;
      const auto cnt = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), m) - sorted.begin());
      const double wl = w.prefix(cnt), sl = s.prefix(cnt);
      const double osc = std::max(0.0, ((st - 2.0 * sl) - m * (wt - 2.0 * wl)) / wt);
      if (osc > best.norm) {
        best.norm = osc;
        best.extremal_run = {i, len};
      }
    }
  });
  best.extremal_arc = mu.arc_of_run(best.extremal_run);
  return best;
}

template <class Filter>
BmoResult scan_complex(const SampledFunction& b, Filter&& keep) {
  const auto& mu = b.measure();
  const std::size_t n = mu.size();
  BmoResult best;
  best.extremal_run = {0, n};
  for_each_run_start(n, [&](std::size_t i, std::size_t max_len) {
    double wt = 0.0;
    cplx st = 0.0;
    for (std::size_t len = 1; len <= max_len; ++len) {
      const std::size_t k = (i + len - 1) % n;
      wt += mu.mass(k);
      st += mu.mass(k) * b[k];
      if (!keep(wt) || len == 1) continue;
      const cplx m = st / wt;
      double osc = 0.0;
      for (std::size_t d = 0; d < len; ++d) {
        const std::size_t q = (i + d) % n;
        osc += std::abs(b[q] - m) * mu.mass(q);
      }
      osc /= wt;
      if (osc > best.norm) {
        best.norm = osc;
        best.extremal_run = {i, len};
      }
    }
  });
  best.extremal_arc = mu.arc_of_run(best.extremal_run);
  return best;
}

template <class Filter>
BmoResult scan(const SampledFunction& b, Filter&& keep) {
  if (b.measure().size() == 0) throw Error("empty measure");
  return is_real(b) ? scan_real(b, keep) : scan_complex(b, keep);
}

}  // namespace

BmoResult bmo_norm(const SampledFunction& b) {
  return scan(b, [](double) { return true; });
}

BmoResult bmo_norm_naive(const SampledFunction& b) {
  const auto& mu = b.measure();
  if (mu.size() == 0) throw Error("empty measure");
  BmoResult best;
  best.extremal_run = {0, mu.size()};
  const auto runs = canonical_runs(mu);
  for (const auto& run : runs) {
    const Arc arc = mu.arc_of_run(run);
    const double mass = measure_of_arc(mu, arc);
    cplx mean = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (arc.contains(mu.atom(k))) mean += b[k] * mu.mass(k);
    }
    mean /= mass;
    double osc = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (arc.contains(mu.atom(k))) osc += std::abs(b[k] - mean) * mu.mass(k);
    }
    osc /= mass;
    if (osc > best.norm) {
      best.norm = osc;
      best.extremal_run = run;
    }
  }
  best.extremal_arc = mu.arc_of_run(best.extremal_run);
  return best;
}

double mean_oscillation(const SampledFunction& b, const Run& run) {
  const auto& mu = b.measure();
  const std::size_t len = std::min(run.length, mu.size());
  const double mass = mu.run_mass(run);
  cplx mean = 0.0;
  for (std::size_t d = 0; d < len; ++d) {
    const std::size_t k = (run.first + d) % mu.size();
    mean += b[k] * mu.mass(k);
  }
  mean /= mass;
  double osc = 0.0;
  for (std::size_t d = 0; d < len; ++d) {
    const std::size_t k = (run.first + d) % mu.size();
    osc += std::abs(b[k] - mean) * mu.mass(k);
  }
  return osc / mass;
}

double vmo_modulus(const SampledFunction& b, double eps) {
  const double cap = eps + 1e-12;
  return scan(b, [cap](double mass) { return mass <= cap; }).norm;
}

cplx dual_pairing(const SampledFunction& f, const SampledFunction& b) {
  if (f.measure_ptr() != b.measure_ptr() && !(f.measure() == b.measure())) {
    throw Error("measure mismatch");
  }
  cplx s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * b[k] * f.measure().mass(k);
  return s;
}

SampledFunction extremal_pairing_atom(const SampledFunction& b, const BmoResult& r) {
  const auto& mu = b.measure();
  const std::size_t n = mu.size();
  const std::size_t len = std::min(r.extremal_run.length, n);
  const double mass = mu.run_mass(r.extremal_run);
  cplx mean = 0.0;
  for (std::size_t d = 0; d < len; ++d) {
    const std::size_t k = (r.extremal_run.first + d) % n;
    mean += b[k] * mu.mass(k);
  }
  mean /= mass;
  std::vector<cplx> s(n, 0.0);
  cplx smean = 0.0;
  for (std::size_t d = 0; d < len; ++d) {
    const std::size_t k = (r.extremal_run.first + d) % n;
    const cplx dev = b[k] - mean;
    s[k] = std::abs(dev) > 0.0 ? std::conj(dev) / std::abs(dev) : 0.0;
    smean += s[k] * mu.mass(k);
  }
  smean /= mass;
  std::vector<cplx> a(n, 0.0);
  for (std::size_t d = 0; d < len; ++d) {
    const std::size_t k = (r.extremal_run.first + d) % n;
    a[k] = (s[k] - smean) / (2.0 * mass);
  }
  return SampledFunction(b.measure_ptr(), std::move(a));
}

}  // namespace clarkbmo
