#pragma once

#include <vector>

namespace qbell {

// Certified lower bound on the Schmidt number of a d-dimensional bipartite
// state from its fidelity with the maximally entangled target.
struct WitnessResult {
  int d = 0;
  double fidelity = 0.0;
  int bound = 1;          // S_L in [1, d]; 1 means nothing certified
  bool certified = false; // bound >= 2
};

// Largest gamma in [1, d] with F > (gamma - 1)/d, strict at the boundary:
// min(d, floor(F d) + 1), or F d itself when F d is an integer.
WitnessResult schmidt_lower_bound(double fidelity, int d);

// One result per d = 2^1 .. 2^n_max with F = pair_fidelity^N.
std::vector<WitnessResult> witness_sweep(double pair_fidelity, int n_max);

}  // namespace qbell
