#include "qbell/witness.hpp"

#include <cmath>
#include <stdexcept>

#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell {

WitnessResult schmidt_lower_bound(double fidelity, int d) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0))
    throw std::invalid_argument("schmidt_lower_bound: fidelity must lie in [0, 1]");
  if (d < 2) throw std::invalid_argument("schmidt_lower_bound: d must be >= 2");
  const double fd = fidelity * d;
  const double fl = std::floor(fd);
  // F > (gamma-1)/d <=> gamma < F d + 1; the strict inequality excludes the
  // boundary gamma = F d + 1 when F d is an integer.
  int bound = (fd == fl) ? static_cast<int>(fl) : static_cast<int>(fl) + 1;
  if (bound < 1) bound = 1;
  if (bound > d) bound = d;
  return WitnessResult{d, fidelity, bound, bound >= 2};
}

std::vector<WitnessResult> witness_sweep(double pair_fidelity, int n_max) {
  if (n_max < 1) throw std::invalid_argument("witness_sweep: n_max must be >= 1");
  std::vector<WitnessResult> results;
  results.reserve(n_max);
  for (int n = 1; n <= n_max; ++n)
    results.push_back(schmidt_lower_bound(ensemble_fidelity(pair_fidelity, n), 1 << n));
  return results;
}

}  // namespace qbell
