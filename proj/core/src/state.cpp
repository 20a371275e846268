#include "qbell/state.hpp"

#include <cmath>
#include <sstream>

namespace qbell {

namespace {

// Largest dimension for which PSD validation does a full eigendecomposition.
constexpr int kEigenCheckCap = 512;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) fail("StateVector: empty amplitude vector");
  double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > tol::kEq) {
    std::ostringstream os;
    os << "StateVector: squared norm " << n2 << " deviates from 1 beyond tolerance";
    fail(os.str());
  }
}

DensityOperator::DensityOperator(Eigen::MatrixXcd matrix) : mat_(std::move(matrix)) {
  const auto n = mat_.rows();
  if (n == 0 || mat_.cols() != n) fail("DensityOperator: matrix must be square and nonempty");
  if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > tol::kEq)
    fail("DensityOperator: matrix is not Hermitian within tolerance");
  if (std::abs(mat_.trace() - Complex(1.0, 0.0)) > tol::kEq)
    fail("DensityOperator: trace deviates from 1 beyond tolerance");
  if (n <= kEigenCheckCap) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::kPsdFloor)
      fail("DensityOperator: smallest eigenvalue below PSD floor");
  } else {
    // Eigendecomposition is too costly here; diagonal entries of a PSD matrix
    // are nonnegative, so check those.
    if (mat_.diagonal().real().minCoeff() < tol::kPsdFloor)
      fail("DensityOperator: negative diagonal entry below PSD floor");
  }
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
  // Rank-one projector: PSD and unit trace by construction.
  Eigen::MatrixXcd m = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityOperator(std::move(m), Unchecked{});
}

PairState::PairState(const Eigen::Matrix4cd& matrix) : mat_(matrix) {
  DensityOperator check{Eigen::MatrixXcd(matrix)};  // reuse the invariant checks
}

PairState::PairState(const DensityOperator& rho) {
  if (rho.dim() != 4) fail("PairState: density operator must have dimension 4");
  mat_ = rho.matrix();
}

DensityOperator PairState::as_density() const { return DensityOperator(Eigen::MatrixXcd(mat_)); }

NoiseModel NoiseModel::ideal() { return NoiseModel(Kind::kIdeal, 1.0, {}); }

NoiseModel NoiseModel::werner(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    fail("NoiseModel: Werner visibility must lie in [0, 1]");
  return NoiseModel(Kind::kWerner, visibility, {});
}

NoiseModel NoiseModel::werner_fidelity(double fidelity) {
  if (!(fidelity >= 0.25 && fidelity <= 1.0))
    fail("NoiseModel: Werner fidelity must lie in [1/4, 1]");
  return NoiseModel(Kind::kWerner, (4.0 * fidelity - 1.0) / 3.0, {});
}

NoiseModel NoiseModel::custom(const PairState& state) {
  return NoiseModel(Kind::kCustom, 1.0, {state.matrix()});
}

double NoiseModel::visibility() const {
  if (kind_ != Kind::kWerner) fail("NoiseModel: visibility defined for Werner models only");
  return visibility_;
}

PairState NoiseModel::pair_state() const {
  switch (kind_) {
    case Kind::kIdeal: {
      const auto phi = bell_pair().amplitudes();
      return PairState(Eigen::Matrix4cd(phi * phi.adjoint()));
    }
    case Kind::kWerner: {
      const auto phi = bell_pair().amplitudes();
      Eigen::Matrix4cd m = visibility_ * (phi * phi.adjoint()) +
                           (1.0 - visibility_) * 0.25 * Eigen::Matrix4cd::Identity();
      return PairState(m);
    }
    case Kind::kCustom:
      return PairState(custom_.front());
  }
  fail("NoiseModel: unknown kind");
}

StateVector bell_pair() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return StateVector(std::move(v));
}

StateVector max_entangled(int d) {
  if (!is_power_of_two(d) || d < 2) fail("max_entangled: d must be 2^N with N >= 1");
  if (d > kDenseDimCap) fail("max_entangled: d exceeds the dense-vector cap");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
  const double a = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) v(static_cast<Eigen::Index>(j) * d + j) = a;
  return StateVector(std::move(v));
}

PairState werner_from_fidelity(double fidelity) {
  if (!(fidelity >= 0.25 && fidelity <= 1.0))
    fail("werner_from_fidelity: fidelity must lie in [1/4, 1]");
  return NoiseModel::werner_fidelity(fidelity).pair_state();
}

double fidelity(const DensityOperator& rho, const StateVector& psi) {
  if (rho.dim() != psi.dim()) fail("fidelity: dimension mismatch");
  const Complex f = psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes();
  if (std::abs(f.imag()) > tol::kEq) fail("fidelity: nonreal expectation value");
  return f.real();
}

double ensemble_fidelity(double pair_fidelity, int n_pairs) {
  if (!(pair_fidelity >= 0.0 && pair_fidelity <= 1.0))
    fail("ensemble_fidelity: pair fidelity must lie in [0, 1]");
  if (n_pairs < 1) fail("ensemble_fidelity: pair count must be >= 1");
  return std::pow(pair_fidelity, n_pairs);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(a.dim()) * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    out.segment(static_cast<Eigen::Index>(i) * b.dim(), b.dim()) =
        a.amplitude(i) * b.amplitudes();
  return StateVector(std::move(out));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator partial_trace_b(const DensityOperator& rho, int dim_a, int dim_b) {
  if (rho.dim() != dim_a * dim_b) fail("partial_trace_b: dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int k = 0; k < dim_b; ++k)
        out(i, j) += rho.matrix()(static_cast<Eigen::Index>(i) * dim_b + k,
                                  static_cast<Eigen::Index>(j) * dim_b + k);
  return DensityOperator(std::move(out));
}

DensityOperator partial_trace_a(const DensityOperator& rho, int dim_a, int dim_b) {
  if (rho.dim() != dim_a * dim_b) fail("partial_trace_a: dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k)
        out(i, j) += rho.matrix()(static_cast<Eigen::Index>(k) * dim_b + i,
                                  static_cast<Eigen::Index>(k) * dim_b + j);
  return DensityOperator(std::move(out));
}

std::vector<int> interleaved_index_of_blocked(int n_pairs) {
  if (n_pairs < 1 || n_pairs > 15) fail("interleaved_index_of_blocked: pair count out of range");
  const int n = n_pairs;
  const int total = 1 << (2 * n);
  std::vector<int> perm(total);
  for (int idx = 0; idx < total; ++idx) {
    // Blocked bit layout, most significant first: a_1..a_N b_1..b_N.
    // Interleaved layout: a_1 b_1 a_2 b_2 .. a_N b_N.
    int inter = 0;
    for (int m = 0; m < n; ++m) {
      const int a_bit = (idx >> (2 * n - 1 - m)) & 1;
      const int b_bit = (idx >> (n - 1 - m)) & 1;
      inter |= a_bit << (2 * (n - m) - 1);
      inter |= b_bit << (2 * (n - m) - 2);
    }
    perm[idx] = inter;
  }
  return perm;
}

StateVector to_party_blocked(const StateVector& interleaved, int n_pairs) {
  const auto perm = interleaved_index_of_blocked(n_pairs);
  if (static_cast<int>(perm.size()) != interleaved.dim())
    fail("to_party_blocked: dimension does not match pair count");
  Eigen::VectorXcd out(interleaved.dim());
  for (int i = 0; i < interleaved.dim(); ++i) out(i) = interleaved.amplitude(perm[i]);
  return StateVector(std::move(out));
}

}  // namespace qbell
