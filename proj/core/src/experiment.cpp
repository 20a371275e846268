#include "qbell/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "qbell/rng.hpp"

namespace qbell {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

// Substream tags keeping the RNG uses of one master seed disjoint; the tag
// occupies the high bits so small counters can be added without collision.
enum StreamTag : std::uint64_t {
  kStreamCounts = 1ULL << 32,
  kStreamBootstrap = 2ULL << 32,
  kStreamTomography = 3ULL << 32,
  kStreamJitter = 4ULL << 32,
};

std::int64_t binomial_draw(std::mt19937_64& eng, std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(trials, p);
  return dist(eng);
}

// Multinomial draw over the cells of `weights` (nonnegative, summing to ~1)
// via sequential conditional binomials in row-major order.
void multinomial_fill(std::mt19937_64& eng, const Eigen::MatrixXd& weights, std::int64_t total,
                      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& out) {
  const Eigen::Index rows = weights.rows(), cols = weights.cols();
  out.setZero(rows, cols);
  std::int64_t remaining = total;
  double mass_left = weights.sum();
  for (Eigen::Index k = 0; k < rows && remaining > 0; ++k) {
    for (Eigen::Index l = 0; l < cols && remaining > 0; ++l) {
      if (k == rows - 1 && l == cols - 1) {
        out(k, l) = remaining;
        remaining = 0;
        break;
      }
      const double w = std::max(weights(k, l), 0.0);
      const double p = mass_left > 0.0 ? std::min(w / mass_left, 1.0) : 0.0;
      const std::int64_t n = binomial_draw(eng, remaining, p);
      out(k, l) = n;
      remaining -= n;
      mass_left -= w;
    }
  }
}

double sample_std(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

Eigen::Vector2cd single_qubit_ket(char c) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Vector2cd v;
  switch (c) {
    case 'H': v << 1.0, 0.0; break;
    case 'V': v << 0.0, 1.0; break;
    case 'D': v << s, s; break;
    case 'R': v << s, Complex(0.0, -s); break;
    case 'L': v << s, Complex(0.0, s); break;
    default: fail("unknown analyzer state label");
  }
  return v;
}

// Projection of a Hermitian spectrum onto the probability simplex
// (eigenvalue clipping with uniform trace redistribution).
Eigen::VectorXd project_spectrum(const Eigen::VectorXd& lambda) {
  const Eigen::Index n = lambda.size();
  std::vector<double> sorted(lambda.data(), lambda.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, shift = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) shift = candidate;
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = std::max(lambda(i) - shift, 0.0);
  return out;
}

}  // namespace

const CountRecord& SettingCounts::at(int a, int b) const {
  if ((a != 1 && a != 2) || (b != 1 && b != 2)) fail("setting indices must be 1 or 2");
  if (a == 1) return b == 1 ? r11 : r12;
  return b == 1 ? r21 : r22;
}

CountRecord sample_counts(const ProbabilityTable& table, std::int64_t total, std::uint64_t seed) {
  if (total < 1) fail("sample_counts: total events must be >= 1");
  CountRecord record;
  record.d = table.d;
  record.a = table.a;
  record.b = table.b;
  record.total = total;
  auto eng = make_engine(seed, kStreamCounts);
  multinomial_fill(eng, table.entries, total, record.counts);
  return record;
}

SettingCounts sample_setting_counts(const SettingTables& tables, std::int64_t events_per_setting,
                                    std::uint64_t seed) {
  SettingCounts counts;
  counts.r11 = sample_counts(tables.t11, events_per_setting, derive_seed(seed, 0));
  counts.r12 = sample_counts(tables.t12, events_per_setting, derive_seed(seed, 1));
  counts.r21 = sample_counts(tables.t21, events_per_setting, derive_seed(seed, 2));
  counts.r22 = sample_counts(tables.t22, events_per_setting, derive_seed(seed, 3));
  return counts;
}

SettingTables frequency_tables(const SettingCounts& records) {
  SettingTables tables;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      const CountRecord& r = records.at(a, b);
      if (r.total < 1) fail("frequency_tables: record with zero total");
      ProbabilityTable& t = tables.at(a, b);
      t.d = r.d;
      t.a = a;
      t.b = b;
      t.entries = r.counts.cast<double>() / static_cast<double>(r.total);
    }
  return tables;
}

BellReport estimate_bell_from_counts(const SettingCounts& records, int resamples,
                                     std::uint64_t seed) {
  const int d = records.r11.d;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      const CountRecord& r = records.at(a, b);
      if (r.d != d) fail("estimate_bell_from_counts: records disagree on d");
      if (r.total < 1) fail("estimate_bell_from_counts: record with zero total");
      if (r.counts.sum() != r.total)
        fail("estimate_bell_from_counts: counts do not sum to the record total");
    }
  const SettingTables freq = frequency_tables(records);
  BellReport report = bell_expression(freq);

  if (resamples >= 2) {
    std::vector<double> values(static_cast<std::size_t>(resamples));
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> draw;
    for (int r = 0; r < resamples; ++r) {
      SettingCounts resampled;
      int slot = 0;
      for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
          const CountRecord& base = records.at(a, b);
          auto eng = make_engine(seed, kStreamBootstrap + 4ULL * r + slot);
          multinomial_fill(eng, freq.at(a, b).entries, base.total, draw);
          CountRecord rec{base.d, a, b, draw, base.total};
          (a == 1 ? (b == 1 ? resampled.r11 : resampled.r12)
                  : (b == 1 ? resampled.r21 : resampled.r22)) = rec;
          ++slot;
        }
      values[static_cast<std::size_t>(r)] = bell_expression(frequency_tables(resampled)).value;
    }
    report.std_error = sample_std(values);
  }
  return report;
}

const std::array<TomographySetting, 16>& tomography_settings() {
  static const std::array<TomographySetting, 16> settings = [] {
    const std::array<const char*, 16> labels = {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                                "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
    std::array<TomographySetting, 16> out;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Eigen::Vector2cd qa = single_qubit_ket(labels[i][0]);
      const Eigen::Vector2cd qb = single_qubit_ket(labels[i][1]);
      Eigen::Vector4cd ket;
      ket << qa(0) * qb(0), qa(0) * qb(1), qa(1) * qb(0), qa(1) * qb(1);
      out[i] = TomographySetting{labels[i], ket};
    }
    return out;
  }();
  return settings;
}

TomographyRecord simulate_tomography(const PairState& pair, std::int64_t events_per_setting,
                                     std::uint64_t seed) {
  if (events_per_setting < 1) fail("simulate_tomography: events per setting must be >= 1");
  TomographyRecord record;
  auto eng = make_engine(seed, kStreamTomography);
  for (const auto& setting : tomography_settings()) {
    const Complex expect = setting.ket.adjoint() * pair.matrix() * setting.ket;
    const double p = std::clamp(expect.real(), 0.0, 1.0);
    record.counts.emplace_back(setting.label, binomial_draw(eng, events_per_setting, p));
  }
  return record;
}

PairState reconstruct_state(const TomographyRecord& record) {
  const auto& settings = tomography_settings();
  std::map<std::string, std::int64_t> by_label;
  for (const auto& [label, count] : record.counts) {
    if (count < 0) fail("reconstruct_state: negative count");
    if (!by_label.emplace(label, count).second)
      fail("reconstruct_state: duplicate setting label " + label);
  }
  if (by_label.size() != settings.size())
    fail("reconstruct_state: record must carry exactly the 16 canonical settings");

  std::array<std::int64_t, 16> counts{};
  for (std::size_t i = 0; i < settings.size(); ++i) {
    auto it = by_label.find(settings[i].label);
    if (it == by_label.end()) fail("reconstruct_state: missing setting " + settings[i].label);
    counts[i] = it->second;
  }

  // The first four settings partition unity; their sum estimates the flux.
  const std::int64_t norm = counts[0] + counts[1] + counts[2] + counts[3];
  if (norm <= 0) fail("reconstruct_state: degenerate all-zero record");

  // Linear inversion: frequencies f_i = Tr[P_i rho] are linear in the
  // column-major entries of rho.
  Eigen::MatrixXcd design(16, 16);
  Eigen::VectorXcd freq(16);
  for (int i = 0; i < 16; ++i) {
    const Eigen::Matrix4cd projector = settings[i].ket * settings[i].ket.adjoint();
    for (int col = 0; col < 4; ++col)
      for (int row = 0; row < 4; ++row) design(i, 4 * col + row) = projector(col, row);
    freq(i) = static_cast<double>(counts[i]) / static_cast<double>(norm);
  }
  const Eigen::VectorXcd x = design.fullPivLu().solve(freq);
  Eigen::Matrix4cd rho;
  for (int col = 0; col < 4; ++col)
    for (int row = 0; row < 4; ++row) rho(row, col) = x(4 * col + row);

  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double trace = rho.trace().real();
  if (std::abs(trace) < 1e-9) fail("reconstruct_state: reconstructed trace is degenerate");
  rho /= trace;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  const Eigen::VectorXd lambda = project_spectrum(es.eigenvalues());
  Eigen::Matrix4cd physical = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i)
    physical += lambda(i) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  // Renormalize the residue of the simplex projection.
  physical /= physical.trace().real();
  return PairState(physical);
}

AnalyzerPhases jittered_phases(int a_setting, int b_setting, int n_pairs, double sigma,
                               std::uint64_t seed) {
  if (sigma < 0.0) fail("jittered_phases: sigma must be >= 0");
  AnalyzerPhases phases = AnalyzerPhases::exact(a_setting, b_setting, n_pairs);
  if (sigma == 0.0) return phases;
  // One Gaussian angle error per distinct physical waveplate setting; a HWP
  // error eps shifts the analyzed factor phase by -4 eps. Residues r and
  // r + 2^{m-1} are read H/V behind the same plate (their phases differ by
  // exactly pi), so they share one error and the outcome basis per setting
  // stays orthonormal; there are sum_m 2^{m-1} = d - 1 settings per party.
  auto eng = make_engine(seed, kStreamJitter);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto* side : {&phases.a, &phases.b})
    for (auto& level : *side) {
      const std::size_t half = std::max<std::size_t>(level.size() / 2, 1);
      std::vector<double> eps(half);
      for (auto& e : eps) e = noise(eng);
      for (std::size_t r = 0; r < level.size(); ++r)
        level[r] *= std::polar(1.0, -4.0 * eps[r % half]);
    }
  return phases;
}

std::vector<BellReport> simulate_bell_measurements(const ExperimentConfig& config, int n_max) {
  if (n_max < 1 || n_max > kTableCapN) fail("simulate_bell_measurements: n_max out of range");
  if (config.events_per_setting < 1) fail("simulate_bell_measurements: events must be >= 1");
  const PairState pair = config.pair_model.pair_state();
  std::vector<BellReport> reports;
  reports.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    SettingTables tables;
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        const auto phases =
            config.angle_jitter_sigma > 0.0
                ? jittered_phases(a, b, n, config.angle_jitter_sigma,
                                  derive_seed(config.seed, 1000 + 10 * n + 2 * a + b))
                : AnalyzerPhases::exact(a, b, n);
        tables.at(a, b) = joint_table_from_phases(pair, phases, a, b);
      }
    const SettingCounts counts =
        sample_setting_counts(tables, config.events_per_setting, derive_seed(config.seed, n));
    reports.push_back(estimate_bell_from_counts(counts, config.bootstrap_resamples,
                                                derive_seed(config.seed, 2000 + n)));
  }
  return reports;
}

std::vector<BellReport> scan_from_tomography(const ExperimentConfig& config, int n_max) {
  if (n_max < 1 || n_max > kTableCapN) fail("scan_from_tomography: n_max out of range");
  const PairState pair = config.pair_model.pair_state();

  const TomographyRecord base_record =
      simulate_tomography(pair, config.events_per_setting, derive_seed(config.seed, 0));
  const PairState reconstructed = reconstruct_state(base_record);
  std::vector<BellReport> reports = scan_dimensions(reconstructed, n_max);

  const int replicates = config.bootstrap_resamples;
  if (replicates >= 2) {
    std::vector<std::vector<double>> values(static_cast<std::size_t>(n_max));
    for (int r = 1; r <= replicates; ++r) {
      const TomographyRecord rec =
          simulate_tomography(pair, config.events_per_setting, derive_seed(config.seed, r));
      const PairState state = reconstruct_state(rec);
      for (int n = 1; n <= n_max; ++n)
        values[static_cast<std::size_t>(n - 1)].push_back(bell_operator_trace(state, n).value);
    }
    for (int n = 1; n <= n_max; ++n)
      reports[static_cast<std::size_t>(n - 1)].std_error =
          sample_std(values[static_cast<std::size_t>(n - 1)]);
  }
  return reports;
}

}  // namespace qbell
