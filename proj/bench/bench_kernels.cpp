#include <benchmark/benchmark.h>

#include <random>

#include "nbch/norms.hpp"
#include "nbch/operators.hpp"
#include "nbch/poisson.hpp"
#include "nbch/reference.hpp"

namespace {

nbch::ScalarField noise(const nbch::GridSpec& g, std::uint64_t seed) {
  nbch::ScalarField f(g);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < g.size(); ++k)
    f.data()[k] = (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 0.5;
  return f;
}

nbch::GridSpec bench_grid(long n) {
  return nbch::make_grid(3.14159265358979312, 1.57079632679489656,
                         static_cast<std::size_t>(n), static_cast<std::size_t>(n));
}

void bm_jacobian_omp(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::ScalarField u = noise(g, 1), v = noise(g, 2);
  nbch::ScalarField out(g);
  for (auto _ : state) {
    nbch::jacobian_into(u, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_jacobian_ref(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::ScalarField u = noise(g, 1), v = noise(g, 2);
  for (auto _ : state) {
    nbch::ScalarField out = nbch::ref::jacobian(u, v);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_laplacian_omp(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::ScalarField u = noise(g, 1);
  nbch::ScalarField out(g);
  for (auto _ : state) {
    nbch::laplacian_into(u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_laplacian_ref(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::ScalarField u = noise(g, 1);
  for (auto _ : state) {
    nbch::ScalarField out = nbch::ref::laplacian(u);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_l2_omp(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::ScalarField u = noise(g, 1);
  for (auto _ : state) {
    double n = nbch::l2_norm(u);
    benchmark::DoNotOptimize(n);
  }
}

void bm_l2_ref(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::ScalarField u = noise(g, 1);
  for (auto _ : state) {
    double n = nbch::ref::l2_norm(u);
    benchmark::DoNotOptimize(n);
  }
}

void bm_poisson(benchmark::State& state) {
  const nbch::GridSpec g = bench_grid(state.range(0));
  const nbch::SolverPlan plan(g);
  const nbch::ScalarField rhs = noise(g, 3);
  nbch::ScalarField out(g);
  nbch::PoissonWorkspace ws;
  for (auto _ : state) {
    nbch::solve_poisson(plan, rhs, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(bm_jacobian_omp)->Arg(127)->Arg(255);
BENCHMARK(bm_jacobian_ref)->Arg(127)->Arg(255);
BENCHMARK(bm_laplacian_omp)->Arg(127)->Arg(255);
BENCHMARK(bm_laplacian_ref)->Arg(127)->Arg(255);
BENCHMARK(bm_l2_omp)->Arg(127)->Arg(255);
BENCHMARK(bm_l2_ref)->Arg(127)->Arg(255);
BENCHMARK(bm_poisson)->Arg(127)->Arg(255);

BENCHMARK_MAIN();
