#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qbell/measurement.hpp"

using namespace qbell;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<SettingSpec> all_specs() {
  return {SettingSpec(Party::A, 1), SettingSpec(Party::A, 2), SettingSpec(Party::B, 1),
          SettingSpec(Party::B, 2)};
}
}  // namespace

TEST_CASE("setting phases match the fixed measurement convention", "[measurement]") {
  CHECK(SettingSpec(Party::A, 1).phase() == 0.0);
  CHECK(SettingSpec(Party::A, 2).phase() == 0.5);
  CHECK(SettingSpec(Party::B, 1).phase() == 0.25);
  CHECK(SettingSpec(Party::B, 2).phase() == -0.25);
  CHECK(SettingSpec(Party::B, 1).label() == "B1");
  CHECK_THROWS_AS(SettingSpec(Party::A, 3), std::invalid_argument);
}

TEST_CASE("eigenvector_full explicit small cases", "[measurement]") {
  const double s = 1.0 / std::sqrt(2.0);
  SECTION("A setting 1, outcome 0, d=2 is the +X state") {
    const StateVector v = eigenvector_full(SettingSpec(Party::A, 1), 0, 2);
    CHECK(std::abs(v.amplitude(0) - Complex(s, 0)) < tol::kEq);
    CHECK(std::abs(v.amplitude(1) - Complex(s, 0)) < tol::kEq);
  }
  SECTION("B setting 1, outcome 0, d=2 carries phase pi/4") {
    const StateVector v = eigenvector_full(SettingSpec(Party::B, 1), 0, 2);
    CHECK(std::abs(v.amplitude(0) - Complex(s, 0)) < tol::kEq);
    CHECK(std::abs(v.amplitude(1) - std::polar(s, kPi / 4.0)) < tol::kEq);
  }
  SECTION("input validation") {
    CHECK_THROWS_AS(eigenvector_full(SettingSpec(Party::A, 1), 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(eigenvector_full(SettingSpec(Party::A, 1), -1, 2), std::invalid_argument);
    CHECK_THROWS_AS(eigenvector_full(SettingSpec(Party::A, 1), 0, 128), std::invalid_argument);
    CHECK_THROWS_AS(eigenvector_full(SettingSpec(Party::A, 1), 0, 3), std::invalid_argument);
  }
}

TEST_CASE("each setting's eigenbasis is orthonormal and complete", "[measurement]") {
  for (const auto& spec : all_specs()) {
    for (int d : {2, 8, 16}) {
      Eigen::MatrixXcd basis(d, d);
      for (int k = 0; k < d; ++k) basis.col(k) = eigenvector_full(spec, k, d).amplitudes();
      const Eigen::MatrixXcd gram = basis.adjoint() * basis;
      CHECK((gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < tol::kEq);
      // Completeness: sum_k |k><k| = B B^dag = identity.
      const Eigen::MatrixXcd resolution = basis * basis.adjoint();
      CHECK((resolution - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < tol::kEq);
    }
  }
}

TEST_CASE("eigenvector_product explicit factors", "[measurement]") {
  const double s = 1.0 / std::sqrt(2.0);
  SECTION("A setting 1, outcome 0 has flat factors") {
    const auto p = eigenvector_product(SettingSpec(Party::A, 1), 0, 4);
    REQUIRE(p.factors.size() == 2);
    for (const auto& f : p.factors) {
      CHECK(std::abs(f(0) - Complex(s, 0)) < tol::kEq);
      CHECK(std::abs(f(1) - Complex(s, 0)) < tol::kEq);
    }
  }
  SECTION("A setting 2, outcome 0, d=2 carries phase pi/2 on qubit 1") {
    const auto p = eigenvector_product(SettingSpec(Party::A, 2), 0, 2);
    REQUIRE(p.factors.size() == 1);
    CHECK(std::abs(p.factors[0](1) - std::polar(s, kPi / 2.0)) < tol::kEq);
  }
  SECTION("factors are normalized") {
    const auto p = eigenvector_product(SettingSpec(Party::B, 2), 5, 16);
    for (const auto& f : p.factors) CHECK(f.norm() == Approx(1.0).margin(1e-12));
  }
  CHECK_THROWS_AS(eigenvector_product(SettingSpec(Party::A, 1), -1, 4), std::invalid_argument);
}

TEST_CASE("product form equals full form up to global phase", "[measurement]") {
  for (const auto& spec : all_specs())
    for (int d : {2, 4, 8, 16, 32})
      for (int outcome = 0; outcome < d; ++outcome) {
        const StateVector full = eigenvector_full(spec, outcome, d);
        const StateVector prod = eigenvector_product(spec, outcome, d).tensor_product();
        const double overlap = std::abs(full.amplitudes().dot(prod.amplitudes()));
        CHECK(overlap == Approx(1.0).margin(1e-12));
      }
}

TEST_CASE("product factor phases are periodic in the outcome mod d", "[measurement]") {
  for (const auto& spec : all_specs())
    for (int d : {2, 8}) {
      for (int outcome = 0; outcome < d; ++outcome) {
        const auto base = eigenvector_product(spec, outcome, d);
        const auto shifted = eigenvector_product(spec, outcome + d, d);
        for (std::size_t m = 0; m < base.factors.size(); ++m)
          CHECK((base.factors[m] - shifted.factors[m]).norm() < 1e-12);
      }
    }
}

TEST_CASE("waveplate matrices match their defining forms", "[measurement]") {
  SECTION("hwp at 0 is diag(1,-1)") {
    const Eigen::Matrix2cd h = hwp_matrix(0.0);
    CHECK(std::abs(h(0, 0) - Complex(1, 0)) < tol::kEq);
    CHECK(std::abs(h(1, 1) - Complex(-1, 0)) < tol::kEq);
    CHECK(std::abs(h(0, 1)) < tol::kEq);
  }
  SECTION("hwp at pi/8") {
    const double s = 1.0 / std::sqrt(2.0);
    const Eigen::Matrix2cd h = hwp_matrix(kPi / 8.0);
    Eigen::Matrix2cd expected;
    expected << s, -s, -s, -s;
    CHECK((h - expected).cwiseAbs().maxCoeff() < tol::kEq);
  }
  SECTION("hwp is unitary, qwp is unitary after 1/sqrt(2)") {
    for (double angle : {-0.7, 0.0, 0.3, kPi / 5}) {
      const Eigen::Matrix2cd h = hwp_matrix(angle);
      CHECK((h * h.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < tol::kEq);
      const Eigen::Matrix2cd q = qwp_matrix(angle) / std::sqrt(2.0);
      CHECK((q * q.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < tol::kEq);
    }
  }
  SECTION("combined analyzer unitary") {
    const Eigen::Matrix2cd u = waveplate_unitary(0.37);
    CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < tol::kEq);
  }
}

TEST_CASE("compiled angles", "[measurement]") {
  SECTION("A setting 1, outcome 0 compiles to -pi/8 on every qubit") {
    for (int m = 1; m <= 4; ++m) {
      const auto w = compile_angles(SettingSpec(Party::A, 1), 0, m);
      CHECK(w.theta_hwp == Approx(-kPi / 8.0).margin(1e-15));
      CHECK(w.gamma_qwp == -kPi / 4.0);
    }
  }
  SECTION("B setting 1, outcome 0, qubit 1") {
    // theta = -pi/8 - 2pi (1/4) / (4 * 2) = -3pi/16.
    const auto w = compile_angles(SettingSpec(Party::B, 1), 0, 1);
    CHECK(w.theta_hwp == Approx(-3.0 * kPi / 16.0).margin(1e-15));
  }
  SECTION("index validation") {
    CHECK_THROWS_AS(compile_angles(SettingSpec(Party::A, 1), 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(compile_angles(SettingSpec(Party::A, 1), -1, 1), std::invalid_argument);
  }
}

TEST_CASE("compiled analyzer maps each product factor onto H", "[measurement]") {
  for (const auto& spec : all_specs())
    for (int outcome = 0; outcome < 16; ++outcome)
      for (int m = 1; m <= 4; ++m) {
        const auto factor = eigenvector_product(spec, outcome, 16).factors[m - 1];
        const auto w = compile_angles(spec, outcome, m);
        const Eigen::Vector2cd rotated = waveplate_unitary(w.theta_hwp) * factor;
        CHECK(std::norm(rotated(0)) == Approx(1.0).margin(1e-12));
      }
}

TEST_CASE("waveplate settings count", "[measurement]") {
  CHECK(waveplate_settings_count(2) == 1);
  CHECK(waveplate_settings_count(16) == 15);
  CHECK_THROWS_AS(waveplate_settings_count(5), std::invalid_argument);
}
