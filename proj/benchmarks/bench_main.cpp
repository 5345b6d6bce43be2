#include <benchmark/benchmark.h>

#include <ekrylov/ekrylov.hpp>

using namespace ekrylov;

static void BM_ClosedForm(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_coefficients(Gaussian{0.0, 1.0}, m));
}
BENCHMARK(BM_ClosedForm)->Arg(128)->Arg(1024);

static void BM_Hankel(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto mom = moments(Uniform{0.0, 1.0}, 2 * m - 2);
  for (auto _ : state) benchmark::DoNotOptimize(hankel_coefficients(mom, m));
}
BENCHMARK(BM_Hankel)->Arg(8)->Arg(13);

static void BM_Stieltjes(benchmark::State& state) {
  const auto ensemble = sample_discrete(Gaussian{0.0, 1.0}, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(stieltjes_coefficients(ensemble, 64));
}
BENCHMARK(BM_Stieltjes)->Arg(2000)->Arg(20000);

static void BM_EvolveEig(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto chain = build_chain(closed_form_coefficients(Gaussian{0.0, 1.0}, m), m);
  const auto times = uniform_grid(10.0, 200);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_eig(chain, StateVector::basis(m, 1), times));
}
BENCHMARK(BM_EvolveEig)->Arg(128)->Arg(400);

static void BM_LaguerreMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(laguerre_matrix(1.0, 6.0, n));
}
BENCHMARK(BM_LaguerreMatrix)->Arg(64)->Arg(200);

static void BM_Correlator(benchmark::State& state) {
  const auto chain = build_chain(closed_form_coefficients(QGaussianAskey{0.0, 1.0, 0.0}, 128), 128);
  const ChainPropagator propagator(chain);
  const auto times = uniform_grid(30.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(correlator(propagator, 45, times));
}
BENCHMARK(BM_Correlator)->Arg(100)->Arg(400);
BENCHMARK_MAIN();
