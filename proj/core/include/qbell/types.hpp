#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace qbell {

using Complex = std::complex<double>;

// Numeric tolerances shared across the library.
namespace tol {
// Elementwise equality, normalization, Hermiticity, unit-trace checks.
inline constexpr double kEq = 1e-12;
// Probability-table normalization and marginal (no-signaling) checks.
inline constexpr double kTable = 1e-9;
// Smallest admissible density-operator eigenvalue.
inline constexpr double kPsdFloor = -1e-10;
// Probabilities below this are an error; values in [kNegClip, 0) clip to 0.
inline constexpr double kNegClip = -1e-12;
}  // namespace tol

// Resource caps for dense representations.
//
// Full d^2-dimensional kets and d^2 x d^2 operators are only materialized for
// d <= kDenseDimCap; larger dimensions are served by the per-pair factorized
// path. Full d x d joint tables go up to N = kTableCapN pairs (d = 4096);
// above kStreamingDefaultN only the d aligned-diagonal accumulators are kept.
inline constexpr int kDenseDimCap = 64;
inline constexpr int kTableCapN = 12;
inline constexpr int kStreamingDefaultN = 10;
// Largest d for exhaustive local-strategy enumeration (d^4 strategies).
inline constexpr int kLrtDimCap = 16;

// Fixed default seed so bare invocations are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 42;

constexpr bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

constexpr int log2_exact(int d) {
  if (!is_power_of_two(d)) throw std::invalid_argument("dimension is not a power of two");
  int n = 0;
  while ((1 << n) < d) ++n;
  return n;
}

}  // namespace qbell
