#include <stls/alm.hpp>
#include <stls/linalg.hpp>
#include <stls/prox.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using stls::Index;
using stls::Matrix;

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m(k) = g(rng);
  return m;
}

void BM_Svt(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix z = gaussian(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(stls::svt(z, 1.0));
}
BENCHMARK(BM_Svt)->Arg(10)->Arg(30)->Arg(100);

void BM_SylvesterSymmetric(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix g1 = gaussian(n, n, 2), g2 = gaussian(n, n, 3);
  const stls::SylvesterSolver solver(g1 * g1.transpose(), g2 * g2.transpose());
  const Matrix c = gaussian(n, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(c));
}
BENCHMARK(BM_SylvesterSymmetric)->Arg(10)->Arg(30)->Arg(100);

void BM_SylvesterGeneral(benchmark::State& state) {
  const Index n = state.range(0);
  const stls::SylvesterSolver solver(gaussian(n, n, 5), gaussian(n, n, 6));
  const Matrix c = gaussian(n, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(c));
}
BENCHMARK(BM_SylvesterGeneral)->Arg(10)->Arg(30)->Arg(100);

void BM_AlmNn(benchmark::State& state) {
  const Index n = state.range(0);
  const auto p = stls::StlsProblem::make(gaussian(n, n, 8), stls::Toeplitz{});
  const stls::SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(stls::alm_nn_stls(p, 1.0, cfg));
}
BENCHMARK(BM_AlmNn)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ReweightedStls(benchmark::State& state) {
  const Index n = state.range(0);
  const auto p = stls::StlsProblem::make(gaussian(n, n, 9));
  const stls::SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(stls::reweighted_stls(p, cfg));
}
BENCHMARK(BM_ReweightedStls)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
