// Serial vs OpenMP kernels on problem sizes used by the composite solvers.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emtime/core/stencil.hpp"
#include "emtime/kernels/kernels.hpp"

namespace k = emtime::kernels;
using k::cplx;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(u(rng), u(rng));
  return v;
}

template <bool Omp>
void BM_dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_complex(n, 1), b = random_complex(n, 2);
  for (auto _ : state) {
    const cplx s = Omp ? k::omp::dot(std::span<const cplx>(a), std::span<const cplx>(b))
                       : k::serial::dot(std::span<const cplx>(a), std::span<const cplx>(b));
    benchmark::DoNotOptimize(s);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n * sizeof(cplx)));
}

template <bool Omp>
void BM_apply_stencil(benchmark::State& state) {
  const auto nx = static_cast<std::size_t>(state.range(0)), nR = static_cast<std::size_t>(state.range(1));
  std::vector<double> V(nx * nR, 0.5);
  k::Stencil2D s;
  s.nx = nx;
  s.nR = nR;
  s.potential = V;
  s.weights = emtime::laplacian_weights(emtime::StencilOrder::fourth);
  s.cx = -0.5;
  s.cR = -0.05;
  const auto in = random_complex(nx * nR, 3);
  std::vector<cplx> out(nx * nR);
  for (auto _ : state) {
    if (Omp)
      k::omp::apply_stencil(s, std::span<const cplx>(in), std::span<cplx>(out));
    else
      k::serial::apply_stencil(s, std::span<const cplx>(in), std::span<cplx>(out));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * nx * nR));
}

template <bool Omp>
void BM_project_rows(benchmark::State& state) {
  const auto nbasis = static_cast<std::size_t>(state.range(0));
  const std::size_t nx = 201, nR = static_cast<std::size_t>(state.range(1));
  const auto basis = random_complex(nbasis * nx, 4), field = random_complex(nx * nR, 5);
  const std::vector<double> wx(nx, 0.05);
  std::vector<cplx> out(nbasis * nR);
  for (auto _ : state) {
    if (Omp)
      k::omp::project_rows(basis, nbasis, wx, field, nx, nR, out);
    else
      k::serial::project_rows(basis, nbasis, wx, field, nx, nR, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * nbasis * nx * nR));
}

}  // namespace

BENCHMARK(BM_dot<false>)->Name("dot/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_dot<true>)->Name("dot/omp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_apply_stencil<false>)->Name("apply_stencil/serial")->Args({128, 128})->Args({41, 5095})->Args({512, 512});
BENCHMARK(BM_apply_stencil<true>)->Name("apply_stencil/omp")->Args({128, 128})->Args({41, 5095})->Args({512, 512});
BENCHMARK(BM_project_rows<false>)->Name("project_rows/serial")->Args({2, 2001})->Args({8, 2001})->Args({8, 8001});
BENCHMARK(BM_project_rows<true>)->Name("project_rows/omp")->Args({2, 2001})->Args({8, 2001})->Args({8, 8001});

BENCHMARK_MAIN();
