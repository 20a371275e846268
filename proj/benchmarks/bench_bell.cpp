#include <benchmark/benchmark.h>

#include <random>

#include "qbell/bell.hpp"
#include "qbell/experiment.hpp"
#include "qbell/state.hpp"

namespace {

using namespace qbell;

// Slightly anisotropic mixed pair: forces the general streaming path.
PairState perturbed_pair() {
  std::mt19937_64 eng(12);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd g(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = Complex(normal(eng), normal(eng));
  Eigen::MatrixXcd noise = g * g.adjoint();
  noise /= noise.trace().real();
  Eigen::Matrix4cd rho =
      0.9 * werner_from_fidelity(0.98).matrix() + 0.1 * Eigen::Matrix4cd(noise);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return PairState(rho);
}

void BM_bell_operator_trace_isotropic(benchmark::State& state) {
  const PairState pair = werner_from_fidelity(0.982);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bell_operator_trace(pair, n).value);
}
BENCHMARK(BM_bell_operator_trace_isotropic)->Arg(4)->Arg(8)->Arg(12);

void BM_bell_operator_trace_general(benchmark::State& state) {
  const PairState pair = perturbed_pair();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bell_operator_trace(pair, n).value);
}
BENCHMARK(BM_bell_operator_trace_general)->Arg(4)->Arg(6)->Arg(8)->Arg(10);

void BM_joint_table_factorized(benchmark::State& state) {
  const PairState pair = perturbed_pair();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(joint_table_factorized(pair, n, 1, 1).entries(0, 0));
}
BENCHMARK(BM_joint_table_factorized)->Arg(2)->Arg(5)->Arg(8)->Arg(10);

void BM_joint_table_dense_pure(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const StateVector phi = max_entangled(d);
  for (auto _ : state) benchmark::DoNotOptimize(joint_table_dense(phi, 1, 1).entries(0, 0));
}
BENCHMARK(BM_joint_table_dense_pure)->Arg(4)->Arg(16)->Arg(64);

void BM_joint_table_dense_density(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const DensityOperator rho = DensityOperator::from_pure(max_entangled(d));
  for (auto _ : state) benchmark::DoNotOptimize(joint_table_dense(rho, 1, 1).entries(0, 0));
}
BENCHMARK(BM_joint_table_dense_density)->Arg(4)->Arg(8)->Arg(16);

void BM_lrt_max(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lrt_max(d).max_value);
}
BENCHMARK(BM_lrt_max)->Arg(4)->Arg(8)->Arg(16);

void BM_sample_counts(benchmark::State& state) {
  const SettingTables tables = setting_tables_factorized(werner_from_fidelity(0.982), 4);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_counts(tables.t11, 100000, ++seed).counts(0, 0));
}
BENCHMARK(BM_sample_counts);

void BM_reconstruct_state(benchmark::State& state) {
  const TomographyRecord record =
      simulate_tomography(werner_from_fidelity(0.982), 100000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_state(record).matrix()(0, 0));
}
BENCHMARK(BM_reconstruct_state);

}  // namespace

BENCHMARK_MAIN();
