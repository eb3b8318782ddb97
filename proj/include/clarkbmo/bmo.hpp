#pragma once

#include "clarkbmo/measure.hpp"

namespace clarkbmo {

struct BmoResult {
  double norm = 0.0;
  Arc extremal_arc = Arc::full_circle();
  Run extremal_run{0, 0};
};

/// sup over positive-mass arcs (full circle included) of the mu-mean oscillation.
/// Real-valued input uses rank-indexed Fenwick trees per start atom, O(N^2 log N);
/// complex input extends runs incrementally with prefix-sum means.
BmoResult bmo_norm(const SampledFunction& b);

/// Reference enumeration over geometric arcs with membership recomputed per arc, O(N^3).
BmoResult bmo_norm_naive(const SampledFunction& b);

/// (1/mu(D)) sum_{xi in D} |b - <b>_D| mu{xi} for one run.
double mean_oscillation(const SampledFunction& b, const Run& run);

/// Supremum restricted to arcs with mu(D) <= eps; 0 when none qualify.
double vmo_modulus(const SampledFunction& b, double eps);

/// sum f b mu; the two functions must share a measure.
cplx dual_pairing(const SampledFunction& f, const SampledFunction& b);

/// Atom on the extremal arc of b whose pairing with b is half the oscillation there:
/// (s - <s>)/(2 mu(D)) with s = conj(b - <b>)/|b - <b>|.
SampledFunction extremal_pairing_atom(const SampledFunction& b, const BmoResult& r);

}  // namespace clarkbmo
