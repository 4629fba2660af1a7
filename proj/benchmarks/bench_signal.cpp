#include "dpod/rng.hpp"
#include "dpod/signal.hpp"

#include <benchmark/benchmark.h>

using namespace dpod;

namespace {

ComplexVec random_vec(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    ComplexVec v(n);
    for (cplx& z : v) z = rng.cgaussian(1.0);
    return v;
}

void BM_Dft(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    ComplexVec x = random_vec(1, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dft(x));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Dft)->Arg(1024)->Arg(3240)->Arg(4096)->Arg(12288);

void BM_CyclicConvolve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    ComplexVec a = random_vec(2, n);
    ComplexVec b = random_vec(3, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cyclic_convolve(a, b));
    }
}
BENCHMARK(BM_CyclicConvolve)->Arg(1024)->Arg(4096);

void BM_LowpassTaps(benchmark::State& state) {
    SubcarrierConfig cfg(4096, 3240, 428, 428);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lowpass_taps(cfg));
    }
}
BENCHMARK(BM_LowpassTaps);

}  // namespace
