#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qbell/types.hpp"

namespace qbell {

// Normalized complex amplitude vector over a (possibly composite) Hilbert
// space. Immutable after construction; construction checks normalization.
class StateVector {
 public:
  explicit StateVector(Eigen::VectorXcd amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex amplitude(int i) const { return amps_(i); }

 private:
  Eigen::VectorXcd amps_;
};

// Hermitian, positive-semidefinite, unit-trace operator. Construction checks
// Hermiticity and trace elementwise to tol::kEq and the smallest eigenvalue
// against tol::kPsdFloor (eigenvalue check capped at dim 512; beyond that the
// diagonal floor is checked instead).
class DensityOperator {
 public:
  explicit DensityOperator(Eigen::MatrixXcd matrix);
  static DensityOperator from_pure(const StateVector& psi);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }

 private:
  struct Unchecked {};
  DensityOperator(Eigen::MatrixXcd matrix, Unchecked) : mat_(std::move(matrix)) {}
  Eigen::MatrixXcd mat_;
};

// One A qubit (x) one B qubit, basis order |00>,|01>,|10>,|11> with 0 = H
// and 1 = V. The A bit is the most significant.
class PairState {
 public:
  explicit PairState(const Eigen::Matrix4cd& matrix);
  explicit PairState(const DensityOperator& rho);

  const Eigen::Matrix4cd& matrix() const { return mat_; }
  DensityOperator as_density() const;

 private:
  Eigen::Matrix4cd mat_;
};

// Per-pair noise model; the same model applies to every pair (homogeneous
// source approximation).
class NoiseModel {
 public:
  enum class Kind { kIdeal, kWerner, kCustom };

  static NoiseModel ideal();
  static NoiseModel werner(double visibility);           // V in [0, 1]
  static NoiseModel werner_fidelity(double fidelity);    // F in [1/4, 1]
  static NoiseModel custom(const PairState& state);

  Kind kind() const { return kind_; }
  double visibility() const;  // Werner only
  PairState pair_state() const;

 private:
  NoiseModel(Kind kind, double visibility, std::vector<Eigen::Matrix4cd> custom)
      : kind_(kind), visibility_(visibility), custom_(std::move(custom)) {}
  Kind kind_;
  double visibility_ = 1.0;
  std::vector<Eigen::Matrix4cd> custom_;  // empty unless kCustom
};

// |phi> = (|00> + |11>)/sqrt(2), the two-qubit resource state.
StateVector bell_pair();

// (1/sqrt(d)) sum_j |j>_A |j>_B over a d x d bipartite space, d = 2^N.
// Party-blocked amplitude order: index = j_A * d + j_B, and within a party
// qubit 1 is the most significant bit of j. Dense construction only for
// d <= kDenseDimCap.
StateVector max_entangled(int d);

// V |phi><phi| + (1-V) I/4 with V = (4F - 1)/3; fidelity with |phi> equals F.
PairState werner_from_fidelity(double fidelity);

// <psi| rho |psi>, real up to tol::kEq imaginary residue.
double fidelity(const DensityOperator& rho, const StateVector& psi);

// F_pair^N: fidelity of N homogeneous pairs against the N-pair target.
double ensemble_fidelity(double pair_fidelity, int n_pairs);

StateVector tensor(const StateVector& a, const StateVector& b);
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Reduced state of party A (resp. B) of a state on a dim_a x dim_b space.
DensityOperator partial_trace_b(const DensityOperator& rho, int dim_a, int dim_b);
DensityOperator partial_trace_a(const DensityOperator& rho, int dim_a, int dim_b);

// Permutation mediating between pair-interleaved qubit order
// (A1,B1,A2,...,BN) and party-blocked order (A1..AN,B1..BN); entry p[i] is
// the interleaved basis index of blocked basis index i. Qubit 1 is the most
// significant bit on each side.
std::vector<int> interleaved_index_of_blocked(int n_pairs);

// Reorders an N-pair state from interleaved to party-blocked amplitude order.
StateVector to_party_blocked(const StateVector& interleaved, int n_pairs);

}  // namespace qbell
