#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qbell/experiment.hpp"
#include "qbell/rng.hpp"
#include "test_helpers.hpp"

using namespace qbell;
using Catch::Approx;

namespace {

ProbabilityTable point_mass_table(int d, int a, int b, int k0, int l0) {
  ProbabilityTable t{d, a, b, Eigen::MatrixXd::Zero(d, d)};
  t.entries(k0, l0) = 1.0;
  return t;
}

ProbabilityTable uniform_table(int d, int a, int b) {
  return ProbabilityTable{d, a, b, Eigen::MatrixXd::Constant(d, d, 1.0 / (d * d))};
}

}  // namespace

TEST_CASE("multinomial sampling of tables", "[experiment]") {
  SECTION("point mass concentrates every event") {
    const auto record = sample_counts(point_mass_table(4, 1, 1, 2, 3), 100, 7);
    CHECK(record.counts(2, 3) == 100);
    CHECK(record.counts.sum() == 100);
    CHECK(record.total == 100);
  }
  SECTION("identical seeds reproduce identical records") {
    const auto t = uniform_table(4, 2, 1);
    const auto r1 = sample_counts(t, 5000, 99);
    const auto r2 = sample_counts(t, 5000, 99);
    CHECK((r1.counts - r2.counts).cwiseAbs().maxCoeff() == 0);
    const auto r3 = sample_counts(t, 5000, 100);
    CHECK((r1.counts - r3.counts).cwiseAbs().maxCoeff() != 0);
  }
  SECTION("large samples converge to the cell probabilities") {
    const std::int64_t total = 1000000;
    const auto record = sample_counts(uniform_table(2, 1, 1), total, 4242);
    const double p = 0.25;
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(total));
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        const double freq = static_cast<double>(record.counts(k, l)) / total;
        CHECK(std::abs(freq - p) < 3.0 * sigma);
      }
  }
  CHECK_THROWS_AS(sample_counts(uniform_table(2, 1, 1), 0, 1), std::invalid_argument);
}

TEST_CASE("bell estimation from counts", "[experiment]") {
  SECTION("exact uniform frequencies reproduce the zero value") {
    SettingCounts counts;
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        CountRecord r;
        r.d = 4;
        r.a = a;
        r.b = b;
        r.counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(4, 4, 25);
        r.total = 400;
        (a == 1 ? (b == 1 ? counts.r11 : counts.r12) : (b == 1 ? counts.r21 : counts.r22)) = r;
      }
    const BellReport report = estimate_bell_from_counts(counts, 0, 1);
    CHECK(std::abs(report.value) < 1e-12);
    CHECK_FALSE(report.std_error.has_value());
  }
  SECTION("exact point-mass frequencies reproduce the strategy value") {
    const DeterministicStrategy s{0, 1, 0, 2};
    const int d = 4;
    SettingCounts counts;
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        const auto t = point_mass_table(d, a, b, a == 1 ? s.a1 : s.a2, b == 1 ? s.b1 : s.b2);
        const auto r = sample_counts(t, 1000, 5);  // point mass: deterministic counts
        (a == 1 ? (b == 1 ? counts.r11 : counts.r12) : (b == 1 ? counts.r21 : counts.r22)) = r;
      }
    const BellReport report = estimate_bell_from_counts(counts, 0, 1);
    CHECK(report.value == Approx(strategy_value(s, d)).margin(1e-12));
  }
  SECTION("bootstrap errors are deterministic and positive") {
    const SettingTables tables = setting_tables_factorized(werner_from_fidelity(0.9), 1);
    const SettingCounts counts = sample_setting_counts(tables, 2000, 11);
    const BellReport r1 = estimate_bell_from_counts(counts, 50, 123);
    const BellReport r2 = estimate_bell_from_counts(counts, 50, 123);
    REQUIRE(r1.std_error.has_value());
    CHECK(*r1.std_error > 0.0);
    CHECK(r1.value == r2.value);
    CHECK(*r1.std_error == *r2.std_error);
  }
  SECTION("zero-total records are rejected") {
    SettingCounts counts;
    CHECK_THROWS_AS(estimate_bell_from_counts(counts, 0, 1), std::invalid_argument);
  }
}

TEST_CASE("bootstrap error grows with dimension", "[experiment]") {
  const PairState pair = werner_from_fidelity(0.982);
  double mean2 = 0.0, mean16 = 0.0;
  const int seeds = 8;
  for (int seed = 0; seed < seeds; ++seed) {
    for (int n : {1, 4}) {
      const SettingTables tables = setting_tables_factorized(pair, n);
      const SettingCounts counts = sample_setting_counts(tables, 20000, 1000 + seed);
      const BellReport report = estimate_bell_from_counts(counts, 60, 77 + seed);
      (n == 1 ? mean2 : mean16) += *report.std_error / seeds;
    }
  }
  CHECK(mean16 > mean2);
}

TEST_CASE("tomography settings are the canonical sixteen", "[experiment]") {
  const auto& settings = tomography_settings();
  REQUIRE(settings.size() == 16);
  CHECK(settings[0].label == "HH");
  CHECK(settings[3].label == "VH");
  for (const auto& s : settings) CHECK(s.ket.norm() == Approx(1.0).margin(1e-12));
  // The first four projectors resolve the identity.
  Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) sum += settings[i].ket * settings[i].ket.adjoint();
  CHECK((sum - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("simulated tomography counts", "[experiment]") {
  SECTION("pure pair puts half the flux into HH") {
    const std::int64_t events = 100000;
    const auto record = simulate_tomography(NoiseModel::ideal().pair_state(), events, 3);
    const double sigma = std::sqrt(0.25 / static_cast<double>(events));
    CHECK(std::abs(static_cast<double>(record.counts[0].second) / events - 0.5) < 5 * sigma);
  }
  SECTION("maximally mixed pair spreads one quarter everywhere") {
    const std::int64_t events = 100000;
    const auto record = simulate_tomography(werner_from_fidelity(0.25), events, 4);
    for (const auto& [label, count] : record.counts)
      CHECK(std::abs(static_cast<double>(count) / events - 0.25) < 0.01);
  }
  SECTION("seed determinism") {
    const PairState pair = werner_from_fidelity(0.9);
    const auto r1 = simulate_tomography(pair, 1000, 5);
    const auto r2 = simulate_tomography(pair, 1000, 5);
    CHECK(r1.counts == r2.counts);
  }
}

TEST_CASE("state reconstruction", "[experiment]") {
  SECTION("noiseless frequencies invert exactly") {
    // All Born probabilities of the Bell pair are dyadic, so a power-of-two
    // event count yields exact integer counts.
    const PairState pure = NoiseModel::ideal().pair_state();
    const std::int64_t events = 1 << 12;
    TomographyRecord record;
    for (const auto& setting : tomography_settings()) {
      const Complex expect = setting.ket.adjoint() * pure.matrix() * setting.ket;
      record.counts.emplace_back(
          setting.label, static_cast<std::int64_t>(std::llround(expect.real() * events)));
    }
    const PairState reconstructed = reconstruct_state(record);
    CHECK(fidelity(reconstructed.as_density(), bell_pair()) >= 1.0 - 1e-9);
  }
  SECTION("reconstruction calibration against the true state") {
    const PairState truth = werner_from_fidelity(0.982);
    int good = 0;
    const int runs = 60;
    for (int seed = 0; seed < runs; ++seed) {
      const auto record = simulate_tomography(truth, 100000, 9000 + seed);
      const PairState reconstructed = reconstruct_state(record);
      if (qbell::test::state_fidelity(reconstructed.matrix(), truth.matrix()) >= 0.99) ++good;
    }
    CHECK(good >= (runs * 95) / 100);
  }
  SECTION("noisy reconstructions are always physical") {
    std::mt19937_64 eng(31337);
    for (int trial = 0; trial < 30; ++trial) {
      const PairState truth = qbell::test::random_pair_state(eng);
      // Deliberately low statistics force the PSD projection to act.
      const auto record = simulate_tomography(truth, 200, 100 + trial);
      CHECK_NOTHROW(reconstruct_state(record));  // PairState enforces the invariants
    }
  }
  SECTION("degenerate and malformed records are rejected") {
    TomographyRecord zeros;
    for (const auto& setting : tomography_settings()) zeros.counts.emplace_back(setting.label, 0);
    CHECK_THROWS_AS(reconstruct_state(zeros), std::invalid_argument);
    TomographyRecord missing;
    CHECK_THROWS_AS(reconstruct_state(missing), std::invalid_argument);
  }
}

TEST_CASE("jittered analyzer phases", "[experiment]") {
  SECTION("zero sigma reduces to the exact phases") {
    const auto exact = AnalyzerPhases::exact(1, 2, 3);
    const auto jittered = jittered_phases(1, 2, 3, 0.0, 5);
    for (int m = 0; m < 3; ++m)
      for (std::size_t r = 0; r < exact.a[m].size(); ++r) {
        CHECK(std::abs(exact.a[m][r] - jittered.a[m][r]) < 1e-15);
        CHECK(std::abs(exact.b[m][r] - jittered.b[m][r]) < 1e-15);
      }
  }
  SECTION("jittered tables remain normalized probability tables") {
    const PairState pair = werner_from_fidelity(0.95);
    for (double sigma : {0.005, 0.02}) {
      const auto phases = jittered_phases(2, 1, 3, sigma, 17);
      const auto table = joint_table_from_phases(pair, phases, 2, 1);
      CHECK(normalization_defect(table) < tol::kTable);
      CHECK(table.entries.minCoeff() >= 0.0);
    }
  }
  SECTION("jitter degrades the ideal violation") {
    ExperimentConfig config;
    config.pair_model = NoiseModel::ideal();
    config.events_per_setting = 200000;
    config.angle_jitter_sigma = 0.05;
    config.bootstrap_resamples = 0;
    config.seed = 21;
    const auto reports = simulate_bell_measurements(config, 1);
    CHECK(reports[0].value < 2.0 * std::sqrt(2.0));
  }
}

TEST_CASE("counted-measurement pipeline", "[experiment]") {
  ExperimentConfig config;
  config.pair_model = NoiseModel::werner_fidelity(0.982);
  config.events_per_setting = 100000;
  config.bootstrap_resamples = 40;
  config.seed = 2024;
  const auto reports = simulate_bell_measurements(config, 2);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].d == 2);
  CHECK(reports[0].value == Approx(2.76).margin(0.06));
  REQUIRE(reports[0].std_error.has_value());
  CHECK(*reports[0].std_error > 0.0);

  const auto repeat = simulate_bell_measurements(config, 2);
  CHECK(repeat[0].value == reports[0].value);
  CHECK(*repeat[0].std_error == *reports[0].std_error);
}

TEST_CASE("tomography-based scan pipeline", "[experiment]") {
  ExperimentConfig config;
  config.pair_model = NoiseModel::werner_fidelity(0.982);
  config.events_per_setting = 100000;
  config.bootstrap_resamples = 25;
  config.seed = 77;
  const auto reports = scan_from_tomography(config, 4);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].value == Approx(2.75).margin(0.05));
  for (const auto& r : reports) {
    CHECK(r.violation);
    REQUIRE(r.std_error.has_value());
    CHECK(*r.std_error > 0.0);
    CHECK(*r.std_error < 0.1);
  }
  const auto repeat = scan_from_tomography(config, 4);
  CHECK(repeat[2].value == reports[2].value);
  CHECK(*repeat[2].std_error == *reports[2].std_error);
}
