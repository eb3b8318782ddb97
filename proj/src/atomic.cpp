#include "clarkbmo/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "clarkbmo/error.hpp"
#include "clarkbmo/linalg.hpp"

namespace clarkbmo {

void MuAtom::validate(const DiscreteMeasure& mu, double slack) const {
  const std::size_t n = mu.size();
  if (values.size() != n) throw Error("atom value count does not match the measure");
  const double mass = mu.run_mass(run);
  std::vector<bool> inside(n, false);
  for (std::size_t d = 0; d < std::min(run.length, n); ++d) inside[(run.first + d) % n] = true;
  cplx mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!inside[k] && values[k] != 0.0) throw Error("atom support leaves its arc");
    if (!arc.contains(mu.atom(k)) && values[k] != 0.0) throw Error("atom support leaves its arc");
    if (std::abs(values[k]) > (1.0 + slack) / mass) throw Error("atom exceeds 1/mu(arc)");
    mean += values[k] * mu.mass(k);
  }
  if (std::abs(mean) > slack) throw Error("atom mean is not zero");
}

std::vector<cplx> AtomicDecomposition::reconstruct(std::size_t n) const {
  std::vector<cplx> out(n, 0.0);
  for (const auto& t : terms) {
    for (std::size_t k = 0; k < n; ++k) out[k] += t.lambda * t.atom.values[k];
  }
  return out;
}

std::vector<double> maximal_function(const SampledFunction& f) {
  const auto& mu = f.measure();
  const std::size_t n = mu.size();
  if (n == 0) throw Error("empty measure");
  std::vector<double> mf(n, 0.0);
  std::vector<double> suffix(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0, s = 0.0;
    std::vector<double> mean(n + 1, 0.0);
    for (std::size_t len = 1; len <= n; ++len) {
      const std::size_t k = (i + len - 1) % n;
      w += mu.mass(k);
      s += std::abs(f[k]) * mu.mass(k);
      mean[len] = s / w;
    }
    suffix[n] = mean[n];
    for (std::size_t len = n - 1; len >= 1; --len) suffix[len] = std::max(mean[len], suffix[len + 1]);
    for (std::size_t d = 0; d < n; ++d) {
      const std::size_t k = (i + d) % n;
      mf[k] = std::max(mf[k], suffix[d + 1]);
    }
  }
  return mf;
}

namespace {

void require_zero_mean(const SampledFunction& f) {
  const auto& mu = f.measure();
  if (mu.size() == 0) throw Error("empty measure");
  if (std::abs(f.integral()) > 1e-10 * f.sup_norm() * mu.total_mass()) {
    throw Error("nonzero mean, not in H1_at");
  }
}

/// Maximal circular runs of flagged atoms; one full run when every atom is flagged.
std::vector<Run> maximal_runs(const std::vector<bool>& flag) {
  const std::size_t n = flag.size();
  std::vector<Run> runs;
  if (std::all_of(flag.begin(), flag.end(), [](bool b) { return b; })) {
    runs.push_back({0, n});
    return runs;
  }
  std::size_t start = 0;
  while (flag[start]) ++start;  // a good atom exists
  for (std::size_t d = 1; d <= n; ++d) {
    const std::size_t k = (start + d) % n;
    if (flag[k] && !flag[(k + n - 1) % n]) {
      std::size_t len = 0;
      while (flag[(k + len) % n]) ++len;
      runs.push_back({k, len});
    }
  }
  return runs;
}

/// f off the bad set, the run mean of f on each stopping run.
std::vector<cplx> good_part(const SampledFunction& f, const std::vector<Run>& runs) {
  const auto& mu = f.measure();
  const std::size_t n = mu.size();
  std::vector<cplx> g(f.values());
  for (const auto& run : runs) {
    cplx s = 0.0;
    for (std::size_t d = 0; d < run.length; ++d) {
      const std::size_t k = (run.first + d) % n;
      s += f[k] * mu.mass(k);
    }
    const cplx mean = s / mu.run_mass(run);
    for (std::size_t d = 0; d < run.length; ++d) g[(run.first + d) % n] = mean;
  }
  return g;
}

std::vector<Run> stopping_runs(const std::vector<double>& mf, double level) {
  std::vector<bool> bad(mf.size());
  bool any = false;
  for (std::size_t k = 0; k < mf.size(); ++k) {
    bad[k] = mf[k] > level;
    any = any || bad[k];
  }
  return any ? maximal_runs(bad) : std::vector<Run>{};
}

}  // namespace

AtomicDecomposition cz_decompose(const SampledFunction& f) {
  require_zero_mean(f);
  const auto& mu = f.measure();
  const std::size_t n = mu.size();
  AtomicDecomposition out;
  const double fmax = f.sup_norm();
  if (fmax == 0.0) return out;

  double abs_mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) abs_mean += std::abs(f[k]) * mu.mass(k);
  abs_mean /= mu.total_mass();
  int level = static_cast<int>(std::floor(std::log2(abs_mean)));
  while (std::ldexp(1.0, level) >= abs_mean) --level;

  const auto mf = maximal_function(f);
  auto runs = stopping_runs(mf, std::ldexp(1.0, level));
  auto g = good_part(f, runs);
  while (!runs.empty()) {
    auto next_runs = stopping_runs(mf, std::ldexp(1.0, level + 1));
    auto next_g = good_part(f, next_runs);
    for (const auto& run : runs) {
      std::vector<cplx> diff(n, 0.0);
      cplx drift = 0.0;
      for (std::size_t d = 0; d < run.length; ++d) {
        const std::size_t k = (run.first + d) % n;
        diff[k] = next_g[k] - g[k];
        drift += diff[k] * mu.mass(k);
      }
      // The run mean of the difference is zero up to rounding; remove that rounding so it
      // is not amplified by the normalization below.
      drift /= mu.run_mass(run);
      double sup = 0.0;
      for (std::size_t d = 0; d < run.length; ++d) {
        const std::size_t k = (run.first + d) % n;
        diff[k] -= drift;
        sup = std::max(sup, std::abs(diff[k]));
      }
      if (sup <= 1e-15 * fmax) continue;
      const double lambda = sup * mu.run_mass(run);
      for (auto& v : diff) v /= lambda;
      out.terms.push_back({lambda, MuAtom{run, mu.arc_of_run(run), std::move(diff)}});
      out.total_weight += lambda;
    }
    runs = std::move(next_runs);
    g = std::move(next_g);
    ++level;
  }
  return out;
}

namespace {

struct PricedAtom {
  double value = 0.0;
  Run run;
  std::vector<double> values;
};

/// Best real atom on one run against dual density b: (1/mu) min_c sum |b - c| mu,
/// attained by sign(b - c) with a fractional entry at the weighted median.
PricedAtom price_run(const DiscreteMeasure& mu, const std::vector<double>& b, const Run& run) {
  const std::size_t n = mu.size();
  std::vector<std::size_t> idx(run.length);
  for (std::size_t d = 0; d < run.length; ++d) idx[d] = (run.first + d) % n;
  std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return b[p] < b[q]; });
  const double mass = mu.run_mass(run);
  std::size_t med = 0;
  double below = 0.0;
  for (; med < idx.size(); ++med) {
    if (below + mu.mass(idx[med]) >= 0.5 * mass) break;
    below += mu.mass(idx[med]);
  }
  med = std::min(med, idx.size() - 1);
  PricedAtom out;
  out.run = run;
  out.values.assign(n, 0.0);
  double balance = 0.0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (r == med) continue;
    const double s = r < med ? -1.0 : 1.0;
    out.values[idx[r]] = s;
    balance += s * mu.mass(idx[r]);
  }
  out.values[idx[med]] = std::clamp(-balance / mu.mass(idx[med]), -1.0, 1.0);
  double pairing = 0.0;
  for (std::size_t k : idx) {
    out.values[k] /= mass;
    pairing += out.values[k] * mu.mass(k) * b[k];
  }
  out.value = pairing;
  return out;
}

AtomicNormBounds real_atomic_norm(const MeasurePtr& mu_ptr, const std::vector<double>& x) {
  const auto& mu = *mu_ptr;
  const std::size_t n = mu.size();
  AtomicNormBounds out;
  double xmax = 0.0;
  for (double v : x) xmax = std::max(xmax, std::abs(v));
  if (xmax == 0.0 || n < 2) return out;

  std::vector<std::vector<double>> columns;
  std::vector<double> full(x);
  for (auto& v : full) v /= xmax * mu.total_mass();
  columns.push_back(std::move(full));
  try {
    // CZ atoms make a good warm start; a part whose mean is only zero relative to the
    // complex sup norm is still fine for the LP, so a rejection here is not fatal.
    std::vector<cplx> xc(x.begin(), x.end());
    for (const auto& t : cz_decompose(SampledFunction(mu_ptr, xc)).terms) {
      std::vector<double> col(n);
      for (std::size_t k = 0; k < n; ++k) col[k] = t.atom.values[k].real();
      columns.push_back(std::move(col));
    }
  } catch (const Error&) {
  }

  const auto runs = canonical_runs(mu);
  const std::size_t rows = n - 1;  // rows are dependent: every column has zero mu-mean
  const int max_rounds = 500;
  const std::size_t per_round = 8;
  for (int round = 1; round <= max_rounds; ++round) {
    LinearProgram lp;
    const auto cols = static_cast<Eigen::Index>(2 * columns.size());
    lp.A.resize(static_cast<Eigen::Index>(rows), cols);
    lp.b.resize(static_cast<Eigen::Index>(rows));
    lp.c = Eigen::VectorXd::Ones(cols);
    for (std::size_t r = 0; r < rows; ++r) {
      lp.b(static_cast<Eigen::Index>(r)) = x[r];
      for (std::size_t j = 0; j < columns.size(); ++j) {
        lp.A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * j)) = columns[j][r];
        lp.A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * j + 1)) = -columns[j][r];
      }
    }
    const auto sol = solve_lp(lp);
    std::vector<double> b(n, 0.0);
    double dual_obj = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double y = sol.duals(static_cast<Eigen::Index>(r));
      b[r] = y / mu.mass(r);
      dual_obj += y * x[r];
    }

    std::vector<PricedAtom> best;
    double vmax = 0.0;
    for (const auto& run : runs) {
      if (run.length < 2) continue;
      auto p = price_run(mu, b, run);
      vmax = std::max(vmax, p.value);
      if (p.value <= 1.0 + 1e-9) continue;
      best.push_back(std::move(p));
    }
    out.rounds = round;
    out.upper = sol.value;
    out.lower = std::min(out.upper, dual_obj / std::max(vmax, 1.0));
    if (best.empty()) return out;
    std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(std::min(per_round, best.size())),
                      best.end(), [](const PricedAtom& p, const PricedAtom& q) { return p.value > q.value; });
    for (std::size_t k = 0; k < std::min(per_round, best.size()); ++k) columns.push_back(std::move(best[k].values));
  }
  return out;  // bracket from the last round remains certified
}

}  // namespace

AtomicNormBounds atomic_norm_lp(const SampledFunction& f) {
  if (f.measure().size() > kMaxLpAtoms) throw Error("LP size exceeded");
  require_zero_mean(f);
  const std::size_t n = f.size();
  std::vector<double> re(n), im(n);
  bool has_im = false;
  for (std::size_t k = 0; k < n; ++k) {
    re[k] = f[k].real();
    im[k] = f[k].imag();
    has_im = has_im || im[k] != 0.0;
  }
  const auto r = real_atomic_norm(f.measure_ptr(), re);
  if (!has_im) return r;
  const auto i = real_atomic_norm(f.measure_ptr(), im);
  AtomicNormBounds out;
  out.lower = std::max(r.lower, i.lower);
  out.upper = r.upper + i.upper;
  out.rounds = r.rounds + i.rounds;
  return out;
}

std::string to_json(const AtomicDecomposition& d) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : d.terms) {
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : t.atom.values) vals.push_back({v.real(), v.imag()});
    terms.push_back({{"lambda", {t.lambda.real(), t.lambda.imag()}},
                     {"arc", {{"start", t.atom.arc.start().angle()}, {"extent", t.atom.arc.extent()}}},
                     {"values", vals}});
  }
  return nlohmann::json{{"terms", terms}, {"total_weight", d.total_weight}}.dump();
}

}  // namespace clarkbmo
