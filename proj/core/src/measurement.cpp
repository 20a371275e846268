#include "qbell/measurement.hpp"

#include <cmath>
#include <numbers>

namespace qbell {

namespace {
constexpr double kPi = std::numbers::pi;
[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }
}  // namespace

SettingSpec::SettingSpec(Party party, int setting) : party_(party), setting_(setting) {
  if (setting != 1 && setting != 2) fail("SettingSpec: setting index must be 1 or 2");
}

double SettingSpec::phase() const {
  if (party_ == Party::A) return setting_ == 1 ? 0.0 : 0.5;
  return setting_ == 1 ? 0.25 : -0.25;
}

double SettingSpec::phase_argument(int outcome) const {
  return party_ == Party::A ? outcome + phase() : -outcome + phase();
}

std::string SettingSpec::label() const {
  return std::string(party_ == Party::A ? "A" : "B") + std::to_string(setting_);
}

StateVector ProductBasisVector::tensor_product() const {
  const int d = 1 << n_pairs;
  if (d > kDenseDimCap) fail("ProductBasisVector: dense tensor product exceeds cap");
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (const auto& f : factors) {
    Eigen::VectorXcd next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next(2 * i) = v(i) * f(0);
      next(2 * i + 1) = v(i) * f(1);
    }
    v.swap(next);
  }
  return StateVector(std::move(v));
}

StateVector eigenvector_full(const SettingSpec& spec, int outcome, int d) {
  if (!is_power_of_two(d) || d < 2) fail("eigenvector_full: d must be 2^N with N >= 1");
  if (d > kDenseDimCap) fail("eigenvector_full: d exceeds the dense-vector cap");
  if (outcome < 0 || outcome >= d) fail("eigenvector_full: outcome out of range");
  const double arg = spec.phase_argument(outcome);
  Eigen::VectorXcd v(d);
  const double a = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) v(j) = std::polar(a, 2.0 * kPi / d * j * arg);
  return StateVector(std::move(v));
}

ProductBasisVector eigenvector_product(const SettingSpec& spec, int outcome, int d) {
  if (!is_power_of_two(d) || d < 2) fail("eigenvector_product: d must be 2^N with N >= 1");
  if (outcome < 0) fail("eigenvector_product: outcome out of range");
  const int n = log2_exact(d);
  const double arg = spec.phase_argument(outcome);
  std::vector<Eigen::Vector2cd> factors;
  factors.reserve(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int m = 1; m <= n; ++m) {
    Eigen::Vector2cd f;
    f(0) = inv_sqrt2;
    f(1) = std::polar(inv_sqrt2, 2.0 * kPi / (1 << m) * arg);
    factors.push_back(f);
  }
  return ProductBasisVector{spec, outcome, n, std::move(factors)};
}

Eigen::Matrix2cd hwp_matrix(double theta) {
  const double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
  Eigen::Matrix2cd m;
  m << c, -s, -s, -c;
  return m;
}

Eigen::Matrix2cd qwp_matrix(double gamma) {
  const double c = std::cos(2.0 * gamma), s = std::sin(2.0 * gamma);
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << i - c, s, s, i + c;
  return m;
}

Eigen::Matrix2cd waveplate_unitary(double theta) {
  return hwp_matrix(theta) * qwp_matrix(-kPi / 4.0) / std::sqrt(2.0);
}

WaveplateSetting compile_angles(const SettingSpec& spec, int outcome, int qubit_m) {
  if (qubit_m < 1) fail("compile_angles: qubit index must be >= 1");
  if (outcome < 0) fail("compile_angles: outcome out of range");
  const double arg = spec.phase_argument(outcome);
  const double theta = -kPi / 8.0 - 2.0 * kPi * arg / (4.0 * (1 << qubit_m));
  return WaveplateSetting{qubit_m, theta, -kPi / 4.0};
}

int waveplate_settings_count(int d) {
  if (!is_power_of_two(d) || d < 2) fail("waveplate_settings_count: d must be 2^N with N >= 1");
  return d - 1;
}

}  // namespace qbell
