#include <benchmark/benchmark.h>

#include <random>

#include "lowrank/dynamics.hpp"
#include "lowrank/experiment.hpp"

using namespace lowrank;

namespace {

DenseMatrix random_dense(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  DenseMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

// Reference-scale device with the lower mode truncated at range(0) levels.
struct Fixture {
  ReadoutExperiment exp;
  SparseOperator h;
  explicit Fixture(int n_lower)
      : exp([&] {
          DeviceSpec s;
          s.layout = {n_lower, 4, 5};
          return s;
        }()),
        h(exp.hamiltonian(PulseEnvelope::square(kTwoPi * 150e6, 40e-9), false).evaluate(20e-9)) {}
};

void BM_NosseRhs(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const int m = static_cast<int>(state.range(1));
  const DenseMatrix x = lra_init(initial_state(TransmonState::g, f.exp.spec().layout), m, 1e-5, 1).m;
  for (auto _ : state) benchmark::DoNotOptimize(nosse_rhs(x, f.h, f.exp.collapse_ops()));
  state.counters["N"] = static_cast<double>(f.h.rows());
}
BENCHMARK(BM_NosseRhs)->Args({25, 20})->Args({100, 20})->Args({100, 80})->Unit(benchmark::kMillisecond);

// Dense reference right-hand side used by the tests, not the solver kernel.
void BM_LindbladRhsReference(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const Eigen::Index n = f.h.rows();
  const DenseMatrix rho = DenseMatrix::Identity(n, n) / static_cast<double>(n);
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(rho, f.h, f.exp.collapse_ops()));
  state.counters["N"] = static_cast<double>(n);
}
BENCHMARK(BM_LindbladRhsReference)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_Pseudoinverse(benchmark::State& state) {
  const DenseMatrix m = random_dense(state.range(0), state.range(1), 3);
  for (auto _ : state) benchmark::DoNotOptimize(pseudoinverse(m));
}
BENCHMARK(BM_Pseudoinverse)->Args({2000, 20})->Args({2000, 80});

void BM_MultiplyRows(benchmark::State& state) {
  const Fixture f(100);
  const RowMajorDense x = random_dense(f.h.rows(), state.range(0), 4);
  DenseMatrix out(f.h.rows(), state.range(0));
  for (auto _ : state) {
    multiply_rows(f.h, x, out);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_MultiplyRows)->Arg(20)->Arg(80);

void BM_EigenSparseDense(benchmark::State& state) {
  const Fixture f(100);
  const DenseMatrix x = random_dense(f.h.rows(), state.range(0), 4);
  DenseMatrix out(f.h.rows(), state.range(0));
  for (auto _ : state) {
    out.noalias() = f.h * x;
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_EigenSparseDense)->Arg(20)->Arg(80);

}  // namespace
BENCHMARK_MAIN();
