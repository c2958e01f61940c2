// Serial reference vs OpenMP convolution kernels on a 2D multi-coil instance.
// Args: array side N, number of kernels k.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "hicu/kernels.hpp"
#include "hicu/rng.hpp"

using namespace hicu;

namespace {

struct Instance {
  CTensor X;
  KernelMask K;
  Region S;
  CMatrix V, U;

  Instance(Index N, Index k)
      : X(complex_gaussian_tensor({N, N, 8}, 1.0, RngStream{1, 0, 0, 0, StreamPurpose::Test})),
        K(KernelMask::rectangular({5, 5, 8})), S(Region::full(X.dims(), K)),
        V(complex_gaussian_matrix(K.n(), k, 1.0, RngStream{2, 0, 0, 0, StreamPurpose::Test})),
        U(complex_gaussian_matrix(S.s(), k, 1.0, RngStream{3, 0, 0, 0, StreamPurpose::Test})) {}
};

template <auto Fn> void forward(benchmark::State &st) {
  Instance in(st.range(0), st.range(1));
  CMatrix out(in.S.s(), in.V.cols());
  for (auto _ : st) {
    Fn(in.X, in.V, in.K, in.S, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["threads"] = omp_get_max_threads();
}

template <auto Fn> void adjoint(benchmark::State &st) {
  Instance in(st.range(0), st.range(1));
  CMatrix out(in.K.n(), in.U.cols());
  for (auto _ : st) {
    Fn(in.X, in.U, in.K, in.S, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["threads"] = omp_get_max_threads();
}

template <auto Fn> void scatter(benchmark::State &st) {
  Instance in(st.range(0), st.range(1));
  CTensor out(in.X.dims());
  for (auto _ : st) {
    Fn(in.V, in.U, in.K, in.S, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["threads"] = omp_get_max_threads();
}

void sizes(benchmark::internal::Benchmark *b) {
  b->Args({64, 8})->Args({64, 32})->Args({128, 32})->Unit(benchmark::kMillisecond);
}

} // namespace

BENCHMARK(forward<kernels::serial::forward>)->Name("forward/serial")->Apply(sizes);
BENCHMARK(forward<kernels::omp::forward>)->Name("forward/omp")->Apply(sizes);
BENCHMARK(adjoint<kernels::serial::adjoint>)->Name("adjoint/serial")->Apply(sizes);
BENCHMARK(adjoint<kernels::omp::adjoint>)->Name("adjoint/omp")->Apply(sizes);
BENCHMARK(scatter<kernels::serial::scatter>)->Name("scatter/serial")->Apply(sizes);
BENCHMARK(scatter<kernels::omp::scatter>)->Name("scatter/omp")->Apply(sizes);

BENCHMARK_MAIN();
