#include "clarkbmo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "clarkbmo/error.hpp"
#include "clarkbmo/format.hpp"

namespace clarkbmo {

double normalize_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

CirclePoint CirclePoint::from_complex(cplx z) { return CirclePoint(std::arg(z)); }

double CirclePoint::chord(const CirclePoint& other) const {
  // 2 sin(d/2) is exact for antipodal points, unlike |e^{ia} - e^{ib}|.
  return 2.0 * std::sin(0.5 * ccw_to(other));
}

double CirclePoint::ccw_to(const CirclePoint& other) const {
  return normalize_angle(other.angle_ - angle_);
}

Arc::Arc(CirclePoint start, double extent) : start_(start), extent_(extent) {
  if (!(extent >= 0.0) || extent > kTwoPi + kAngleTol) {
    throw Error("arc extent must lie in [0, 2pi]");
  }
  extent_ = std::min(extent, kTwoPi);
}

bool Arc::contains(const CirclePoint& p) const {
  if (is_full()) return true;
  const double d = start_.ccw_to(p);
  return d <= extent_ + kAngleTol || d >= kTwoPi - kAngleTol;
}

DiscreteMeasure::DiscreteMeasure(std::vector<CirclePoint> atoms, std::vector<double> masses)
    : atoms_(std::move(atoms)), masses_(std::move(masses)) {
  if (atoms_.size() != masses_.size()) {
    throw ParseError("atoms", "atom and mass counts differ");
  }
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
      throw ParseError("atoms[" + std::to_string(i) + "].mass",
                       "nonpositive mass at index " + std::to_string(i));
    }
  }
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    const double gap = atoms_[i].angle() - atoms_[i - 1].angle();
    if (std::abs(gap) < kMinAtomGap) {
      throw ParseError("atoms[" + std::to_string(i) + "].angle", "duplicate atom");
    }
    if (gap < 0.0) {
      throw ParseError("atoms[" + std::to_string(i) + "].angle",
                       "non-increasing angle at index " + std::to_string(i));
    }
  }
  if (atoms_.size() >= 2 &&
      kTwoPi - atoms_.back().angle() + atoms_.front().angle() < kMinAtomGap) {
    throw ParseError("atoms[" + std::to_string(atoms_.size() - 1) + "].angle",
                     "duplicate atom");
  }
  prefix_.assign(masses_.size() + 1, 0.0);
  std::partial_sum(masses_.begin(), masses_.end(), prefix_.begin() + 1);
  total_mass_ = prefix_.back();
}

DiscreteMeasure DiscreteMeasure::from_unsorted(std::vector<CirclePoint> atoms,
                                               std::vector<double> masses) {
  if (atoms.size() != masses.size()) throw ParseError("atoms", "atom and mass counts differ");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return atoms[a].angle() < atoms[b].angle();
  });
  std::vector<CirclePoint> sorted_atoms;
  std::vector<double> sorted_masses;
  for (std::size_t k : order) {
    sorted_atoms.push_back(atoms[k]);
    sorted_masses.push_back(masses[k]);
  }
  return DiscreteMeasure(std::move(sorted_atoms), std::move(sorted_masses));
}

DiscreteMeasure DiscreteMeasure::haar_roots(std::size_t n) {
  std::vector<CirclePoint> atoms;
  for (std::size_t k = 0; k < n; ++k) {
    atoms.emplace_back(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  }
  return DiscreteMeasure(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double DiscreteMeasure::run_mass(const Run& run) const {
  const std::size_t n = size();
  if (run.length >= n) return total_mass_;
  const std::size_t last = run.first + run.length;
  if (last <= n) return prefix_[last] - prefix_[run.first];
  return (total_mass_ - prefix_[run.first]) + prefix_[last - n];
}

Arc DiscreteMeasure::arc_of_run(const Run& run) const {
  if (run.length >= size()) return Arc::full_circle();
  const auto& a = atoms_[run.first];
  const auto& b = atoms_[(run.first + run.length - 1) % size()];
  return Arc(a, a.ccw_to(b));
}

std::size_t DiscreteMeasure::find_atom(const CirclePoint& p) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), p.angle() - kAngleTol,
                             [](const CirclePoint& a, double v) { return a.angle() < v; });
  if (it != atoms_.end() && std::abs(it->angle() - p.angle()) <= kAngleTol) {
    return static_cast<std::size_t>(it - atoms_.begin());
  }
  // wrap: p just below 2pi matching an atom at 0, or vice versa
  for (std::size_t i : {std::size_t{0}, size() - 1}) {
    if (i < size() && atoms_[i].chord(p) <= kAngleTol) return i;
  }
  return size();
}

DiscreteMeasure DiscreteMeasure::rotated(double by) const {
  std::vector<CirclePoint> atoms;
  atoms.reserve(size());
  for (const auto& a : atoms_) atoms.push_back(a.rotated(by));
  return from_unsorted(std::move(atoms), masses_);
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (atoms_[i].angle() != other.atoms_[i].angle() || masses_[i] != other.masses_[i]) {
      return false;
    }
  }
  return true;
}

SampledFunction::SampledFunction(MeasurePtr measure, std::vector<cplx> values)
    : measure_(std::move(measure)), values_(std::move(values)) {
  if (!measure_) throw Error("sampled function needs a measure");
  if (values_.size() != measure_->size()) {
    throw Error("value count " + std::to_string(values_.size()) + " != atom count " +
                std::to_string(measure_->size()));
  }
}

cplx SampledFunction::integral() const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * measure_->mass(i);
  return s;
}

double SampledFunction::sup_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s = std::max(s, std::abs(v));
  return s;
}

std::vector<Run> canonical_runs(const DiscreteMeasure& mu) {
  const std::size_t n = mu.size();
  if (n == 0) throw Error("empty measure");
  std::vector<Run> runs;
  runs.reserve(n * (n - 1) + 1);
  for (std::size_t len = 1; len < n; ++len) {
    for (std::size_t i = 0; i < n; ++i) runs.push_back({i, len});
  }
  runs.push_back({0, n});
  return runs;
}

std::vector<Arc> arcs_with_positive_mass(const DiscreteMeasure& mu) {
  std::vector<Arc> arcs;
  for (const auto& run : canonical_runs(mu)) arcs.push_back(mu.arc_of_run(run));
  return arcs;
}

std::vector<std::size_t> atoms_in_arc(const DiscreteMeasure& mu, const Arc& arc) {
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (arc.contains(mu.atom(i))) {
      double d = arc.start().ccw_to(mu.atom(i));
      if (d >= kTwoPi - kAngleTol) d = 0.0;
      hits.emplace_back(d, i);
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

double measure_of_arc(const DiscreteMeasure& mu, const Arc& arc) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (arc.contains(mu.atom(i))) s += mu.mass(i);
  }
  return s;
}

std::string serialize(const DiscreteMeasure& mu) {
  std::string out = "{\"atoms\":[";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i) out += ',';
    out += "{\"angle\":" + format_double(mu.atom(i).angle()) +
           ",\"mass\":" + format_double(mu.mass(i)) + "}";
  }
  out += "]}";
  return out;
}

DiscreteMeasure deserialize_measure(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array()) {
    throw ParseError("atoms", "missing \"atoms\" array");
  }
  std::vector<CirclePoint> atoms;
  std::vector<double> masses;
  const auto& arr = doc["atoms"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& item = arr[i];
    const std::string where = "atoms[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(where, "atom entry must be an object");
    for (const char* key : {"angle", "mass"}) {
      if (!item.contains(key) || !item[key].is_number()) {
        throw ParseError(where + "." + key, "missing or non-numeric " + std::string(key));
      }
    }
    atoms.emplace_back(item["angle"].get<double>());
    masses.push_back(item["mass"].get<double>());
  }
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

}  // namespace clarkbmo
