#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clarkbmo/circle.hpp"

namespace clarkbmo {

/// Minimum admissible angular gap between two atoms.
inline constexpr double kMinAtomGap = 1e-10;

/// Contiguous circular run of atoms: indices first, first+1, ..., first+length-1 (mod N).
struct Run {
  std::size_t first = 0;
  std::size_t length = 0;
};

/// Finitely many atoms on the circle with positive masses, strictly increasing in angle.
class DiscreteMeasure {
 public:
  /// Validates ordering, gaps and masses; throws ParseError naming the offending index.
  DiscreteMeasure(std::vector<CirclePoint> atoms, std::vector<double> masses);

  /// Convenience constructor: sorts (angle, mass) pairs first.
  static DiscreteMeasure from_unsorted(std::vector<CirclePoint> atoms,
                                       std::vector<double> masses);

  /// Uniform mass 1/n at the n-th roots of unity.
  static DiscreteMeasure haar_roots(std::size_t n);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<CirclePoint>& atoms() const { return atoms_; }
  const std::vector<double>& masses() const { return masses_; }
  const CirclePoint& atom(std::size_t i) const { return atoms_[i]; }
  double mass(std::size_t i) const { return masses_[i]; }
  double total_mass() const { return total_mass_; }

  std::size_t next(std::size_t i) const { return (i + 1) % size(); }
  std::size_t prev(std::size_t i) const { return (i + size() - 1) % size(); }

  /// Mass of the atoms of a run, in O(1) via prefix sums.
  double run_mass(const Run& run) const;

  /// Minimal closed arc containing the run; the full circle when length == N.
  Arc arc_of_run(const Run& run) const;

  /// Index of the atom at angle `p`, or size() if none (tolerance kAngleTol).
  std::size_t find_atom(const CirclePoint& p) const;

  DiscreteMeasure rotated(double by) const;

  bool operator==(const DiscreteMeasure& other) const;

 private:
  std::vector<CirclePoint> atoms_;
  std::vector<double> masses_;
  std::vector<double> prefix_;  // prefix_[k] = masses_[0] + ... + masses_[k-1]
  double total_mass_ = 0.0;
};

using MeasurePtr = std::shared_ptr<const DiscreteMeasure>;

/// Complex values attached to the atoms of a measure.
class SampledFunction {
 public:
  SampledFunction(MeasurePtr measure, std::vector<cplx> values);

  const DiscreteMeasure& measure() const { return *measure_; }
  const MeasurePtr& measure_ptr() const { return measure_; }
  const std::vector<cplx>& values() const { return values_; }
  std::span<const cplx> span() const { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Sum of value * mass over all atoms.
  cplx integral() const;
  double sup_norm() const;

 private:
  MeasurePtr measure_;
  std::vector<cplx> values_;
};

/// All canonical runs with distinct atom content: every run of length 1..N-1 from every
/// start, plus one full-circle run. N(N-1)+1 runs for N >= 2, one run for N == 1.
std::vector<Run> canonical_runs(const DiscreteMeasure& mu);

/// Geometric representatives of canonical_runs.
std::vector<Arc> arcs_with_positive_mass(const DiscreteMeasure& mu);

/// Sum of masses of atoms lying in the closed arc.
double measure_of_arc(const DiscreteMeasure& mu, const Arc& arc);

/// Indices of the atoms lying in the closed arc, in circular order from the arc start.
std::vector<std::size_t> atoms_in_arc(const DiscreteMeasure& mu, const Arc& arc);

/// Canonical JSON: {"atoms":[{"angle":a,"mass":m},...]} with 17 significant digits.
std::string serialize(const DiscreteMeasure& mu);
DiscreteMeasure deserialize_measure(std::string_view text);

}  // namespace clarkbmo
