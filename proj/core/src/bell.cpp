#include "qbell/bell.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qbell {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

double clip_probability(double p) {
  if (p < tol::kNegClip) {
    std::ostringstream os;
    os << "probability " << p << " below the negative-noise floor";
    throw std::domain_error(os.str());
  }
  return p < 0.0 ? 0.0 : p;
}

int mod_d(int x, int d) {
  int r = x % d;
  return r < 0 ? r + d : r;
}

double setting_phase(Party party, int setting) {
  return SettingSpec(party, setting).phase();
}

void check_setting_indices(int a, int b) {
  if ((a != 1 && a != 2) || (b != 1 && b != 2)) fail("setting indices must be 1 or 2");
}

// Infers d from a d^2-dimensional composite state.
int party_dim(int composite_dim) {
  int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(composite_dim))));
  if (d * d != composite_dim) fail("state dimension is not a perfect square");
  if (!is_power_of_two(d) || d < 2) fail("party dimension must be 2^N with N >= 1");
  if (d > kDenseDimCap) fail("party dimension exceeds the dense cap");
  return d;
}

Eigen::MatrixXcd eigenbasis_matrix(Party party, int setting, int d) {
  Eigen::MatrixXcd u(d, d);
  for (int k = 0; k < d; ++k)
    u.col(k) = eigenvector_full(SettingSpec(party, setting), k, d).amplitudes();
  return u;
}

}  // namespace

double normalization_defect(const ProbabilityTable& t) { return std::abs(t.entries.sum() - 1.0); }

const ProbabilityTable& SettingTables::at(int a, int b) const {
  check_setting_indices(a, b);
  if (a == 1) return b == 1 ? t11 : t12;
  return b == 1 ? t21 : t22;
}

ProbabilityTable& SettingTables::at(int a, int b) {
  return const_cast<ProbabilityTable&>(static_cast<const SettingTables&>(*this).at(a, b));
}

double no_signaling_defect(const SettingTables& tables) {
  double worst = 0.0;
  for (int a = 1; a <= 2; ++a) {
    Eigen::VectorXd m1 = tables.at(a, 1).entries.rowwise().sum();
    Eigen::VectorXd m2 = tables.at(a, 2).entries.rowwise().sum();
    worst = std::max(worst, (m1 - m2).cwiseAbs().maxCoeff());
  }
  for (int b = 1; b <= 2; ++b) {
    Eigen::VectorXd m1 = tables.at(1, b).entries.colwise().sum();
    Eigen::VectorXd m2 = tables.at(2, b).entries.colwise().sum();
    worst = std::max(worst, (m1 - m2).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<double> aligned_profile(const ProbabilityTable& t) {
  const int d = t.d;
  std::vector<double> profile(d, 0.0);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) profile[mod_d(k - l, d)] += t.entries(k, l);
  return profile;
}

double aligned_prob(const ProbabilityTable& t, int shift) {
  const int d = t.d;
  const int s = mod_d(shift, d);
  double sum = 0.0;
  for (int l = 0; l < d; ++l) sum += t.entries(mod_d(l + s, d), l);
  return sum;
}

const std::vector<double>& AlignedProfiles::at(int a, int b) const {
  check_setting_indices(a, b);
  if (a == 1) return b == 1 ? p11 : p12;
  return b == 1 ? p21 : p22;
}

AlignedProfiles aligned_profiles(const SettingTables& tables) {
  AlignedProfiles p;
  p.d = tables.t11.d;
  p.p11 = aligned_profile(tables.t11);
  p.p12 = aligned_profile(tables.t12);
  p.p21 = aligned_profile(tables.t21);
  p.p22 = aligned_profile(tables.t22);
  return p;
}

BellReport bell_from_profiles(const AlignedProfiles& profiles) {
  const int d = profiles.d;
  if (d < 2) fail("bell_from_profiles: d must be >= 2");
  BellReport report;
  report.d = d;
  const int half = d / 2;
  report.terms.reserve(half);
  double value = 0.0;
  for (int k = 0; k < half; ++k) {
    BellTerm term;
    term.k = k;
    term.weight = 1.0 - 2.0 * k / (d - 1);
    term.positive = {profiles.p11[k], profiles.p21[mod_d(-(k + 1), d)], profiles.p22[k],
                     profiles.p12[mod_d(-k, d)]};
    term.negative = {profiles.p11[mod_d(-k - 1, d)], profiles.p21[k],
                     profiles.p22[mod_d(-k - 1, d)], profiles.p12[mod_d(k + 1, d)]};
    double pos = term.positive[0] + term.positive[1] + term.positive[2] + term.positive[3];
    double neg = term.negative[0] + term.negative[1] + term.negative[2] + term.negative[3];
    value += term.weight * (pos - neg);
    report.terms.push_back(term);
  }
  report.value = value;
  report.violation = value > report.classical_bound;
  return report;
}

BellReport bell_expression(const SettingTables& tables) {
  const int d = tables.t11.d;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      const auto& t = tables.at(a, b);
      if (t.d != d) fail("bell_expression: tables disagree on d");
      if (t.a != a || t.b != b) fail("bell_expression: table stored in the wrong slot");
      if (normalization_defect(t) > tol::kTable)
        fail("bell_expression: table normalization defect exceeds tolerance");
    }
  return bell_from_profiles(aligned_profiles(tables));
}

PairCoefficients PairCoefficients::from(const PairState& pair) {
  const auto& r = pair.matrix();
  // Basis order |00>,|01>,|10>,|11| with the A bit most significant.
  return PairCoefficients{r(0, 2) + r(1, 3), r(0, 1) + r(2, 3), r(0, 3), r(1, 2)};
}

double PairCoefficients::prob(Complex ea, Complex eb) const {
  const double re = (c_a * ea).real() + (c_b * eb).real() + (c_plus * ea * eb).real() +
                    (c_minus * ea * std::conj(eb)).real();
  return 0.25 * (1.0 + 2.0 * re);
}

bool PairCoefficients::isotropic() const {
  constexpr double eps = 1e-15;
  return std::abs(c_a) < eps && std::abs(c_b) < eps && std::abs(c_minus) < eps;
}

AnalyzerPhases AnalyzerPhases::exact(int a_setting, int b_setting, int n_pairs) {
  check_setting_indices(a_setting, b_setting);
  if (n_pairs < 1) fail("AnalyzerPhases: pair count must be >= 1");
  const double alpha = setting_phase(Party::A, a_setting);
  const double beta = setting_phase(Party::B, b_setting);
  AnalyzerPhases phases;
  phases.a.resize(n_pairs);
  phases.b.resize(n_pairs);
  for (int m = 1; m <= n_pairs; ++m) {
    const int mod = 1 << m;
    auto& pa = phases.a[m - 1];
    auto& pb = phases.b[m - 1];
    pa.resize(mod);
    pb.resize(mod);
    for (int r = 0; r < mod; ++r) {
      pa[r] = std::polar(1.0, 2.0 * kPi * (r + alpha) / mod);
      pb[r] = std::polar(1.0, 2.0 * kPi * (-r + beta) / mod);
    }
  }
  return phases;
}

ProbabilityTable joint_table_dense(const DensityOperator& rho, int a, int b) {
  check_setting_indices(a, b);
  const int d = party_dim(rho.dim());
  const Eigen::MatrixXcd ua = eigenbasis_matrix(Party::A, a, d);
  const Eigen::MatrixXcd ub = eigenbasis_matrix(Party::B, b, d);

  ProbabilityTable table{d, a, b, Eigen::MatrixXd(d, d)};
  Eigen::MatrixXcd w(d, d);
  for (int k = 0; k < d; ++k) {
    // Contract the A indices: w = sum_{jA,jA'} conj(ua(jA,k)) ua(jA',k) * block(jA,jA').
    w.setZero();
    for (int ja = 0; ja < d; ++ja) {
      const Complex cka = std::conj(ua(ja, k));
      for (int jap = 0; jap < d; ++jap) {
        w.noalias() += (cka * ua(jap, k)) *
                       rho.matrix().block(static_cast<Eigen::Index>(ja) * d,
                                          static_cast<Eigen::Index>(jap) * d, d, d);
      }
    }
    const Eigen::VectorXcd diag = (ub.adjoint() * w * ub).diagonal();
    for (int l = 0; l < d; ++l) table.entries(k, l) = clip_probability(diag(l).real());
  }
  return table;
}

ProbabilityTable joint_table_dense(const StateVector& psi, int a, int b) {
  check_setting_indices(a, b);
  const int d = party_dim(psi.dim());
  // Reshape |psi> into the amplitude matrix Psi(jA, jB); the joint amplitude
  // onto |k,l> is then (Ua^dag Psi conj(Ub))(k, l).
  Eigen::MatrixXcd amp_matrix(d, d);
  for (int ja = 0; ja < d; ++ja)
    for (int jb = 0; jb < d; ++jb)
      amp_matrix(ja, jb) = psi.amplitude(ja * d + jb);
  const Eigen::MatrixXcd ua = eigenbasis_matrix(Party::A, a, d);
  const Eigen::MatrixXcd ub = eigenbasis_matrix(Party::B, b, d);
  const Eigen::MatrixXcd joint = ua.adjoint() * amp_matrix * ub.conjugate();

  ProbabilityTable table{d, a, b, Eigen::MatrixXd(d, d)};
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) table.entries(k, l) = std::norm(joint(k, l));
  return table;
}

ProbabilityTable joint_table_from_phases(const PairState& pair, const AnalyzerPhases& phases,
                                         int a, int b) {
  check_setting_indices(a, b);
  const int n = phases.n_pairs();
  if (n < 1 || n > kTableCapN) fail("joint_table_from_phases: pair count out of range");
  const int d = 1 << n;
  const PairCoefficients coeff = PairCoefficients::from(pair);

  // Build in place: level m fills the top-left 2^m x 2^m block from the
  // 2^{m-1} block, expanding the high-index quadrants before the low one.
  ProbabilityTable table{d, a, b, Eigen::MatrixXd(d, d)};
  auto& t = table.entries;
  t(0, 0) = 1.0;
  for (int m = 1; m <= n; ++m) {
    const int size = 1 << m;
    const int half = size >> 1;
    const auto& pa = phases.a[m - 1];
    const auto& pb = phases.b[m - 1];
    for (int k = 0; k < size; ++k) {
      const bool k_high = k >= half;
      for (int l = 0; l < size; ++l) {
        if (!k_high && l < half) continue;
        t(k, l) = t(k % half, l % half) * coeff.prob(pa[k], pb[l]);
      }
    }
    for (int k = 0; k < half; ++k)
      for (int l = 0; l < half; ++l) t(k, l) *= coeff.prob(pa[k], pb[l]);
  }
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) t(k, l) = clip_probability(t(k, l));
  return table;
}

ProbabilityTable joint_table_factorized(const PairState& pair, int n_pairs, int a, int b) {
  return joint_table_from_phases(pair, AnalyzerPhases::exact(a, b, n_pairs), a, b);
}

std::vector<double> aligned_profile_factorized(const PairState& pair, int n_pairs, int a, int b) {
  check_setting_indices(a, b);
  if (n_pairs < 1 || n_pairs > 30) fail("aligned_profile_factorized: pair count out of range");
  const int n = n_pairs;
  const std::int64_t d = std::int64_t{1} << n;
  const PairCoefficients coeff = PairCoefficients::from(pair);
  const double alpha = setting_phase(Party::A, a);
  const double beta = setting_phase(Party::B, b);

  std::vector<double> profile(static_cast<std::size_t>(d), 0.0);

  if (coeff.isotropic()) {
    // Each per-pair factor depends only on (k - l) mod 2^m, so every cell on
    // diagonal s carries the same product and the profile is O(d log d).
    for (std::int64_t s = 0; s < d; ++s) {
      double prod = 1.0;
      for (int m = 1; m <= n; ++m) {
        const std::int64_t mod = std::int64_t{1} << m;
        const double phi = 2.0 * kPi * (static_cast<double>(s & (mod - 1)) + alpha + beta) / mod;
        prod *= 0.25 * (1.0 + 2.0 * (coeff.c_plus * std::polar(1.0, phi)).real());
      }
      profile[s] = clip_probability(static_cast<double>(d) * prod);
    }
    return profile;
  }

  if (n > kTableCapN + 1) fail("aligned_profile_factorized: pair count too large for general states");
  const auto phases = AnalyzerPhases::exact(a, b, n);
  // For each shift s accumulate sum_l prod_m p_m((l+s) mod 2^m, l mod 2^m)
  // by the same level recursion as the table build, on an O(d) buffer.
  std::vector<double> buf(static_cast<std::size_t>(d));
  for (std::int64_t s = 0; s < d; ++s) {
    buf[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
      const std::int64_t size = std::int64_t{1} << m;
      const std::int64_t half = size >> 1;
      const std::int64_t mask = size - 1;
      const auto& pa = phases.a[m - 1];
      const auto& pb = phases.b[m - 1];
      for (std::int64_t r = half; r < size; ++r)
        buf[r] = buf[r - half] * coeff.prob(pa[(r + s) & mask], pb[r]);
      for (std::int64_t r = 0; r < half; ++r)
        buf[r] *= coeff.prob(pa[(r + s) & mask], pb[r]);
    }
    double sum = 0.0;
    for (std::int64_t r = 0; r < d; ++r) sum += buf[r];
    profile[s] = clip_probability(sum);
  }
  return profile;
}

SettingTables setting_tables_dense(const DensityOperator& rho) {
  return SettingTables{joint_table_dense(rho, 1, 1), joint_table_dense(rho, 1, 2),
                       joint_table_dense(rho, 2, 1), joint_table_dense(rho, 2, 2)};
}

SettingTables setting_tables_dense(const StateVector& psi) {
  return SettingTables{joint_table_dense(psi, 1, 1), joint_table_dense(psi, 1, 2),
                       joint_table_dense(psi, 2, 1), joint_table_dense(psi, 2, 2)};
}

SettingTables setting_tables_factorized(const PairState& pair, int n_pairs) {
  return SettingTables{
      joint_table_factorized(pair, n_pairs, 1, 1), joint_table_factorized(pair, n_pairs, 1, 2),
      joint_table_factorized(pair, n_pairs, 2, 1), joint_table_factorized(pair, n_pairs, 2, 2)};
}

BellReport bell_operator_trace(const PairState& pair, int n_pairs) {
  AlignedProfiles profiles;
  profiles.d = 1 << n_pairs;
  profiles.p11 = aligned_profile_factorized(pair, n_pairs, 1, 1);
  profiles.p12 = aligned_profile_factorized(pair, n_pairs, 1, 2);
  profiles.p21 = aligned_profile_factorized(pair, n_pairs, 2, 1);
  profiles.p22 = aligned_profile_factorized(pair, n_pairs, 2, 2);
  return bell_from_profiles(profiles);
}

std::vector<BellReport> scan_dimensions(const PairState& pair, int n_max) {
  if (n_max < 1 || n_max > kTableCapN) fail("scan_dimensions: n_max out of range");
  std::vector<BellReport> reports;
  reports.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) reports.push_back(bell_operator_trace(pair, n));
  return reports;
}

SettingTables strategy_tables(const DeterministicStrategy& s, int d) {
  if (d < 2) fail("strategy_tables: d must be >= 2");
  for (int out : {s.a1, s.a2, s.b1, s.b2})
    if (out < 0 || out >= d) fail("strategy_tables: strategy output out of range");
  SettingTables tables;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      auto& t = tables.at(a, b);
      t.d = d;
      t.a = a;
      t.b = b;
      t.entries = Eigen::MatrixXd::Zero(d, d);
      t.entries(a == 1 ? s.a1 : s.a2, b == 1 ? s.b1 : s.b2) = 1.0;
    }
  return tables;
}

double strategy_value(const DeterministicStrategy& s, int d) {
  return bell_expression(strategy_tables(s, d)).value;
}

LrtResult lrt_max(int d) {
  if (d < 2 || d > kLrtDimCap) fail("lrt_max: d out of the enumeration range");
  const int half = d / 2;
  // Point-mass tables make every term weight w_k = 1 - 2k/(d-1) appear with
  // coefficient 0 or +-1, so (d-1) * value is an exact integer: enumerate
  // with integer weights W_k = (d-1) - 2k and divide once at the end.
  std::vector<std::int64_t> w(half);
  for (int k = 0; k < half; ++k) w[k] = static_cast<std::int64_t>(d - 1) - 2 * k;

  // Contribution of each table as a function of its outcome difference
  // delta = (A_a - B_b) mod d. Tables (1,1) and (2,2) share one shape, and
  // the (2,1) shape is its negation.
  std::vector<std::int64_t> g11(d, 0), g12(d, 0);
  for (int delta = 0; delta < d; ++delta) {
    if (delta < half) g11[delta] += w[delta];
    if (d - 1 - delta < half) g11[delta] -= w[d - 1 - delta];
    const int kp = (d - delta) % d;
    if (kp < half) g12[delta] += w[kp];
    if (delta >= 1 && delta - 1 < half) g12[delta] -= w[delta - 1];
  }

  std::int64_t best_scaled = std::numeric_limits<std::int64_t>::min();
  DeterministicStrategy best_strategy;
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2)
      for (int b1 = 0; b1 < d; ++b1)
        for (int b2 = 0; b2 < d; ++b2) {
          const std::int64_t value = g11[mod_d(a1 - b1, d)] - g11[mod_d(a2 - b1, d)] +
                                     g11[mod_d(a2 - b2, d)] + g12[mod_d(a1 - b2, d)];
          if (value > best_scaled) {
            best_scaled = value;
            best_strategy = DeterministicStrategy{a1, a2, b1, b2};
          }
        }
  return LrtResult{static_cast<double>(best_scaled) / (d - 1), best_strategy};
}

}  // namespace qbell
