#pragma once

#include <string>
#include <vector>

#include "clarkbmo/measure.hpp"

namespace clarkbmo {

/// Arc-supported, zero-mean function with sup |a| <= 1/mu(arc).
struct MuAtom {
  Run run;
  Arc arc;
  std::vector<cplx> values;  ///< one entry per atom of the measure, zero off the run

  /// Throws Error describing the first violated property.
  void validate(const DiscreteMeasure& mu, double slack = 1e-10) const;
};

struct AtomicTerm {
  cplx lambda;
  MuAtom atom;
};

struct AtomicDecomposition {
  std::vector<AtomicTerm> terms;
  double total_weight = 0.0;

  std::vector<cplx> reconstruct(std::size_t n) const;
};

/// max over runs containing each atom of the mu-mean of |f|, O(N^2).
std::vector<double> maximal_function(const SampledFunction& f);

/// Stopping-time decomposition on dyadic levels 2^n of the maximal function.
/// Throws "nonzero mean, not in H1_at" unless sum f mu vanishes.
AtomicDecomposition cz_decompose(const SampledFunction& f);

struct AtomicNormBounds {
  double lower = 0.0;
  double upper = 0.0;
  /// Arc family restricted for size; always false here because pricing covers every arc.
  bool restricted = false;
  int rounds = 0;
};

inline constexpr std::size_t kMaxLpAtoms = 64;

/// Certified bracket for the atomic norm. Real input: column generation over all arcs,
/// lower from the scaled dual, upper from the primal. Complex input: parts solved
/// separately, lower = max, upper = sum.
AtomicNormBounds atomic_norm_lp(const SampledFunction& f);

std::string to_json(const AtomicDecomposition& d);

}  // namespace clarkbmo
