#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qbell/bell.hpp"
#include "qbell/state.hpp"

namespace qbell {

// Finite-statistics outcome counts for one setting pair.
struct CountRecord {
  int d = 0;
  int a = 0, b = 0;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::int64_t total = 0;
};

struct SettingCounts {
  CountRecord r11, r12, r21, r22;

  const CountRecord& at(int a, int b) const;
};

// Multinomial draw of `total` events over the d^2 cells; deterministic in
// (table, total, seed).
CountRecord sample_counts(const ProbabilityTable& table, std::int64_t total, std::uint64_t seed);

SettingCounts sample_setting_counts(const SettingTables& tables, std::int64_t events_per_setting,
                                    std::uint64_t seed);

// Empirical-frequency tables from counts (no model-side invariants implied).
SettingTables frequency_tables(const SettingCounts& records);

// Bell value from empirical frequencies, with a bootstrap standard error
// from `resamples` multinomial resamples of each record (no std_error when
// resamples < 2). Deterministic in (records, resamples, seed).
BellReport estimate_bell_from_counts(const SettingCounts& records, int resamples,
                                     std::uint64_t seed);

// One of the sixteen canonical two-qubit tomography projector settings.
struct TomographySetting {
  std::string label;        // e.g. "HH", "DR"
  Eigen::Vector4cd ket;     // product projector |psi_A> (x) |psi_B>
};

// The canonical informationally complete set of 16 settings, built from the
// single-qubit analyzer states H, V, D = (H+V)/sqrt2, R = (H-iV)/sqrt2,
// L = (H+iV)/sqrt2. The first four (HH, HV, VV, VH) partition unity and
// provide the count normalization.
const std::array<TomographySetting, 16>& tomography_settings();

// Coincidence counts per tomography setting.
struct TomographyRecord {
  std::vector<std::pair<std::string, std::int64_t>> counts;
};

// Binomial coincidence counts from the Born-rule probability of each
// setting; deterministic in (pair, events, seed).
TomographyRecord simulate_tomography(const PairState& pair, std::int64_t events_per_setting,
                                     std::uint64_t seed);

// Linear inversion of the 16 measured frequencies to a Hermitian unit-trace
// matrix, then projection to the nearest physical state by eigenvalue
// clipping with uniform trace redistribution.
PairState reconstruct_state(const TomographyRecord& record);

struct ExperimentConfig {
  NoiseModel pair_model = NoiseModel::ideal();
  std::int64_t events_per_setting = 100000;
  std::uint64_t seed = kDefaultSeed;
  double angle_jitter_sigma = 0.0;  // radians; 0 disables jitter
  int bootstrap_resamples = 200;
};

// Analyzer phases with per-setting waveplate angle errors: each distinct
// physical HWP angle (party, setting, qubit, residue) gets one Gaussian
// angle error of width sigma, entering the factor phase as -4 * error.
AnalyzerPhases jittered_phases(int a_setting, int b_setting, int n_pairs, double sigma,
                               std::uint64_t seed);

// Counted-measurement route: per dimension d = 2^1 .. 2^{n_max}, build the
// model tables (with optional jitter), draw counts, and estimate the Bell
// value with bootstrap errors.
std::vector<BellReport> simulate_bell_measurements(const ExperimentConfig& config, int n_max);

// Density-matrix route: simulate one pair tomography, reconstruct the pair,
// and scan d = 2^1 .. 2^{n_max} through the operator trace. Standard errors
// come from repeating tomography + reconstruction `bootstrap_resamples`
// times on fresh substreams.
std::vector<BellReport> scan_from_tomography(const ExperimentConfig& config, int n_max);

}  // namespace qbell
