#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell {

enum class Party { A, B };

// Party/setting pair carrying the fixed measurement phase:
// (alpha_1, alpha_2) = (0, 1/2) for party A, (beta_1, beta_2) = (1/4, -1/4)
// for party B.
class SettingSpec {
 public:
  SettingSpec(Party party, int setting);

  Party party() const { return party_; }
  int setting() const { return setting_; }
  double phase() const;  // alpha_a or beta_b as an exact dyadic value

  // Argument entering the basis phases: (outcome + alpha) for A,
  // (-outcome + beta) for B.
  double phase_argument(int outcome) const;

  std::string label() const;  // "A1", "A2", "B1", "B2"

 private:
  Party party_;
  int setting_;
};

// Measurement eigenvector in per-qubit product form: factor m (1-based) is
// (|0> + exp(i 2pi/2^m * arg) |1>)/sqrt(2) with arg = phase_argument(outcome).
// Qubit 1 is the most significant bit of the d-dimensional index.
struct ProductBasisVector {
  SettingSpec spec;
  int outcome;
  int n_pairs;
  std::vector<Eigen::Vector2cd> factors;  // factor m at index m-1

  // Dense tensor product of the factors; requires 2^n_pairs <= kDenseDimCap.
  StateVector tensor_product() const;
};

// Compiled physical analyzer setting for one qubit: the half-wave plate at
// theta_hwp followed by the quarter-wave plate fixed at -pi/4 rotates the
// target product factor onto |H>.
struct WaveplateSetting {
  int qubit;         // m in [1, N]
  double theta_hwp;  // radians
  double gamma_qwp;  // radians, always -pi/4
};

// Full-dimension eigenvector (1/sqrt(d)) sum_j exp(i 2pi/d j arg)|j>,
// arg = phase_argument(outcome). Requires d = 2^N <= kDenseDimCap and
// outcome in [0, d).
StateVector eigenvector_full(const SettingSpec& spec, int outcome, int d);

// Product form of the same eigenvector. No dense cap; outcomes >= d are
// accepted and equivalent mod d (the factor phases are 2pi-periodic).
ProductBasisVector eigenvector_product(const SettingSpec& spec, int outcome, int d);

// Half-wave plate at angle theta:
//   [[cos 2t, -sin 2t], [-sin 2t, -cos 2t]].
Eigen::Matrix2cd hwp_matrix(double theta);

// Quarter-wave plate at angle gamma (unnormalized physical form;
// qwp_matrix(g)/sqrt(2) is unitary):
//   [[i - cos 2g, sin 2g], [sin 2g, i + cos 2g]].
Eigen::Matrix2cd qwp_matrix(double gamma);

// Unitary analyzer transformation H(theta) Q(-pi/4) / sqrt(2).
Eigen::Matrix2cd waveplate_unitary(double theta);

// HWP angle for qubit m projecting the outcome's product factor onto |H>:
// theta = -pi/8 - 2pi * phase_argument(outcome) / (4 * 2^m).
WaveplateSetting compile_angles(const SettingSpec& spec, int outcome, int qubit_m);

// Number of distinct waveplate settings needed per operator pair at
// dimension d (one per nontrivial outcome residue).
int waveplate_settings_count(int d);

}  // namespace qbell
