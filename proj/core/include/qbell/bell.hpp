#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qbell/measurement.hpp"
#include "qbell/state.hpp"
#include "qbell/types.hpp"

namespace qbell {

// Joint outcome table for one setting pair: entries(k, l) = P(A_a = k, B_b = l).
struct ProbabilityTable {
  int d = 0;
  int a = 0, b = 0;  // setting indices in {1, 2}
  Eigen::MatrixXd entries;
};

// |sum of entries - 1|.
double normalization_defect(const ProbabilityTable& t);

// The four joint tables of a full run, indexed by (a, b).
struct SettingTables {
  ProbabilityTable t11, t12, t21, t22;

  const ProbabilityTable& at(int a, int b) const;
  ProbabilityTable& at(int a, int b);
};

// Largest marginal discrepancy across remote-setting changes: row marginals
// of (a,1) vs (a,2) and column marginals of (1,b) vs (2,b).
double no_signaling_defect(const SettingTables& tables);

// Aligned diagonal profile of one table: profile[s] = sum_l P(A=(l+s) mod d, B=l).
std::vector<double> aligned_profile(const ProbabilityTable& t);

// sum_l P(A_a = (l+shift) mod d, B_b = l); shift is reduced mod d.
double aligned_prob(const ProbabilityTable& t, int shift);

// The four aligned profiles, enough to evaluate the Bell expression.
struct AlignedProfiles {
  int d = 0;
  std::vector<double> p11, p12, p21, p22;

  const std::vector<double>& at(int a, int b) const;
};

AlignedProfiles aligned_profiles(const SettingTables& tables);

// One weighted term of the CGLMP sum. The four positive slots are
// P(A1=B1+k), P(B1=A2+k+1), P(A2=B2+k), P(B2=A1+k); the four negative slots
// are P(A1=B1-k-1), P(B1=A2-k), P(A2=B2-k-1), P(B2=A1-k-1).
struct BellTerm {
  int k = 0;
  double weight = 0.0;
  std::array<double, 4> positive{};
  std::array<double, 4> negative{};
};

struct BellReport {
  int d = 0;
  double value = 0.0;
  std::vector<BellTerm> terms;
  double classical_bound = 2.0;
  bool violation = false;  // value > classical_bound
  std::optional<double> std_error;
};

// Assembles the CGLMP value sum_{k=0}^{floor(d/2)-1} (1 - 2k/(d-1)) {...}
// from aligned profiles. P(B_b = A_a + k) is the transposed shift, i.e.
// profile[(-k) mod d].
BellReport bell_from_profiles(const AlignedProfiles& profiles);

BellReport bell_expression(const SettingTables& tables);

// Trigonometric coefficients of the per-pair projection probability onto
// equatorial product states (|0> + e^{i phiA}|1>)(|0> + e^{i phiB}|1>)/2:
//   p = 1/4 [1 + 2Re(c_a e^{i phiA}) + 2Re(c_b e^{i phiB})
//            + 2Re(c_plus e^{i(phiA+phiB)}) + 2Re(c_minus e^{i(phiA-phiB)})].
struct PairCoefficients {
  Complex c_a, c_b, c_plus, c_minus;

  static PairCoefficients from(const PairState& pair);
  double prob(Complex ea, Complex eb) const;
  // True when only c_plus is nonzero; joint tables are then circulant and
  // the aligned profiles collapse to a product over qubit levels.
  bool isotropic() const;
};

// Per-qubit analyzer phase factors for one setting pair: a[m-1][r] is the
// unit phase of the A-side factor for outcome residue r mod 2^m, and
// likewise b for the B side. exact() yields e^{i 2pi (r+alpha)/2^m} and
// e^{i 2pi (-r+beta)/2^m}; perturbed schedules model waveplate angle error.
struct AnalyzerPhases {
  std::vector<std::vector<Complex>> a, b;

  static AnalyzerPhases exact(int a_setting, int b_setting, int n_pairs);
  int n_pairs() const { return static_cast<int>(a.size()); }
};

// Dense route: entries(k, l) = <k,l| rho |k,l> with full-dimension
// eigenvectors. rho lives on the d^2-dimensional party-blocked space,
// d = 2^N <= kDenseDimCap.
ProbabilityTable joint_table_dense(const DensityOperator& rho, int a, int b);

// Pure-state fast path of the dense route.
ProbabilityTable joint_table_dense(const StateVector& psi, int a, int b);

// Factorized route: entries(k, l) = prod_m p_m(k mod 2^m, l mod 2^m) for N
// homogeneous pairs; equals the dense route on the corresponding product
// state. Materializes the d x d table; requires N <= kTableCapN.
ProbabilityTable joint_table_factorized(const PairState& pair, int n_pairs, int a, int b);

// Same recursion with caller-supplied analyzer phases (e.g. jittered).
ProbabilityTable joint_table_from_phases(const PairState& pair, const AnalyzerPhases& phases,
                                         int a, int b);

// Streaming route: aligned profile of the factorized table without
// materializing it. O(d) memory, O(d^2) time; O(d log d) for isotropic pairs.
std::vector<double> aligned_profile_factorized(const PairState& pair, int n_pairs, int a, int b);

SettingTables setting_tables_dense(const DensityOperator& rho);
SettingTables setting_tables_dense(const StateVector& psi);
SettingTables setting_tables_factorized(const PairState& pair, int n_pairs);

// Operator-trace route to the Bell value: evaluates the expectation through
// the probability factorization, never materializing the d x d table.
BellReport bell_operator_trace(const PairState& pair, int n_pairs);

// One report per N = 1..n_max (d = 2^N), via bell_operator_trace.
std::vector<BellReport> scan_dimensions(const PairState& pair, int n_max);

// A local deterministic strategy: one fixed outcome per setting.
struct DeterministicStrategy {
  int a1 = 0, a2 = 0, b1 = 0, b2 = 0;
};

// Bell value of the point-mass tables induced by a strategy.
double strategy_value(const DeterministicStrategy& s, int d);

// Point-mass tables of a strategy (for property checks).
SettingTables strategy_tables(const DeterministicStrategy& s, int d);

struct LrtResult {
  double max_value = 0.0;
  DeterministicStrategy argmax;
};

// Exhaustive maximum of the Bell value over all d^4 deterministic local
// strategies; first maximizer in lexicographic (A1, A2, B1, B2) order.
// Any d in [2, kLrtDimCap].
LrtResult lrt_max(int d);

}  // namespace qbell
