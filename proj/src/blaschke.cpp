#include "clarkbmo/blaschke.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "clarkbmo/error.hpp"
#include "clarkbmo/format.hpp"

namespace clarkbmo {

BlaschkeProduct::BlaschkeProduct(std::vector<cplx> zeros, cplx gamma)
    : zeros_(std::move(zeros)), gamma_(gamma) {
  for (std::size_t k = 0; k < zeros_.size(); ++k) {
    if (!(std::abs(zeros_[k]) <= 1.0 - kZeroMargin)) {
      throw ParseError("zeros[" + std::to_string(k) + "]",
                       "zero at index " + std::to_string(k) + " is not inside the disk");
    }
  }
  const double g = std::abs(gamma_);
  if (!(std::abs(g - 1.0) <= 1e-9)) throw ParseError("gamma", "gamma must be unimodular");
  gamma_ /= g;
}

BlaschkeProduct BlaschkeProduct::monomial(std::size_t n) {
  return BlaschkeProduct(std::vector<cplx>(n, 0.0), 1.0);
}

void BlaschkeProduct::check_pole(cplx z) const {
  for (const auto& a : zeros_) {
    if (std::abs(1.0 - std::conj(a) * z) < 1e-14) throw Error("evaluation at pole");
  }
}

cplx BlaschkeProduct::operator()(cplx z) const {
  check_pole(z);
  cplx p = gamma_;
  for (const auto& a : zeros_) p *= (z - a) / (1.0 - std::conj(a) * z);
  return p;
}

cplx BlaschkeProduct::derivative(cplx z) const { return jet(z).d1; }

cplx BlaschkeProduct::second_derivative(cplx z) const { return jet(z).d2; }

Jet BlaschkeProduct::jet(cplx z) const {
  check_pole(z);
  for (const auto& a : zeros_) {
    if (std::abs(z - a) < 1e-8) return jet_product_rule(z);
  }
  cplx value = (*this)(z);
  cplx log_d = 0.0;
  cplx log_d2 = 0.0;
  for (const auto& a : zeros_) {
    const cplx ac = std::conj(a);
    const cplx u = 1.0 / (z - a);
    const cplx v = ac / (1.0 - ac * z);
    log_d += u + v;
    log_d2 += -u * u + v * v;
  }
  return {value, value * log_d, value * (log_d * log_d + log_d2)};
}

Jet BlaschkeProduct::jet_product_rule(cplx z) const {
  check_pole(z);
  Jet p{gamma_, 0.0, 0.0};
  for (const auto& a : zeros_) {
    const cplx ac = std::conj(a);
    const cplx den = 1.0 - ac * z;
    const double w = 1.0 - std::norm(a);
    const cplx b = (z - a) / den;
    const cplx b1 = w / (den * den);
    const cplx b2 = 2.0 * ac * w / (den * den * den);
    p = {p.value * b, p.d1 * b + p.value * b1, p.d2 * b + 2.0 * p.d1 * b1 + p.value * b2};
  }
  return p;
}

cplx BlaschkeProduct::divided_difference(cplx z, cplx w) const {
  check_pole(z);
  check_pole(w);
  const std::size_t n = zeros_.size();
  // suffix[k] = prod_{i >= k} b_i(w)
  std::vector<cplx> suffix(n + 1, 1.0);
  for (std::size_t k = n; k-- > 0;) {
    const cplx a = zeros_[k];
    suffix[k] = suffix[k + 1] * (w - a) / (1.0 - std::conj(a) * w);
  }
  cplx head = 1.0;  // prod_{i < k} b_i(z)
  cplx sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = zeros_[k];
    const cplx ac = std::conj(a);
    sum += head * (1.0 - std::norm(a)) / ((1.0 - ac * z) * (1.0 - ac * w)) * suffix[k + 1];
    head *= (z - a) / (1.0 - ac * z);
  }
  return gamma_ * sum;
}

double BlaschkeProduct::boundary_argument(double t) const {
  double phi = std::arg(gamma_);
  const cplx e = std::polar(1.0, -t);
  for (const auto& a : zeros_) {
    const cplx w = 1.0 - a * e;  // Re w > 0 because |a| < 1
    phi += t + 2.0 * std::atan2(w.imag(), w.real());
  }
  return phi;
}

BlaschkeProduct BlaschkeProduct::squared() const {
  std::vector<cplx> z2 = zeros_;
  z2.insert(z2.end(), zeros_.begin(), zeros_.end());
  return BlaschkeProduct(std::move(z2), gamma_ * gamma_);
}

std::vector<CirclePoint> solve_level_set(const BlaschkeProduct& theta, cplx alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12) throw Error("alpha must be unimodular");
  const std::size_t n = theta.degree();
  if (n == 0) throw Error("level set of a constant inner function");
  const double phi0 = theta.boundary_argument(0.0);
  const double target0 = std::arg(alpha);
  const double j0 = std::ceil((phi0 - target0) / kTwoPi);

  std::vector<CirclePoint> roots;
  roots.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double target = target0 + kTwoPi * (j0 + static_cast<double>(j));
    double lo = 0.0;
    double hi = kTwoPi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (theta.boundary_argument(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    roots.emplace_back(t);
  }
  std::sort(roots.begin(), roots.end(),
            [](const CirclePoint& a, const CirclePoint& b) { return a.angle() < b.angle(); });
  for (const auto& r : roots) {
    if (std::abs(theta(r.value()) - alpha) > 1e-10) throw Error("level-set root finding failed");
  }
  return roots;
}

double argument_derivative_positivity(const BlaschkeProduct& theta, const CirclePoint& xi) {
  const cplx z = xi.value();
  const Jet j = theta.jet(z);
  if (std::abs(std::abs(j.value) - 1.0) > 1e-9) throw Error("point is not on the boundary");
  const cplx v = std::conj(j.value) * z * j.d1;
  if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-9 * std::abs(v)) {
    throw Error("conj(alpha) xi theta'(xi) is not positive real");
  }
  return v.real();
}

double second_derivative_ratio(const BlaschkeProduct& theta, std::size_t samples) {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Jet j = theta.jet(std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(samples)));
    worst = std::max(worst, std::abs(j.d2) / std::norm(j.d1));
  }
  return worst;
}

namespace {

cplx parse_pair(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(where, "expected [re, im] at " + where);
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

std::string serialize(const BlaschkeProduct& theta) {
  auto pair = [](cplx z) {
    return "[" + format_double(z.real()) + "," + format_double(z.imag()) + "]";
  };
  std::string out = "{\"zeros\":[";
  for (std::size_t k = 0; k < theta.degree(); ++k) {
    if (k) out += ',';
    out += pair(theta.zeros()[k]);
  }
  out += "],\"gamma\":" + pair(theta.gamma()) + "}";
  return out;
}

BlaschkeProduct deserialize_blaschke(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("zeros") || !doc["zeros"].is_array()) {
    throw ParseError("zeros", "missing \"zeros\" array");
  }
  std::vector<cplx> zeros;
  for (std::size_t k = 0; k < doc["zeros"].size(); ++k) {
    zeros.push_back(parse_pair(doc["zeros"][k], "zeros[" + std::to_string(k) + "]"));
  }
  cplx gamma = 1.0;
  if (doc.contains("gamma")) gamma = parse_pair(doc["gamma"], "gamma");
  return BlaschkeProduct(std::move(zeros), gamma);
}

}  // namespace clarkbmo
