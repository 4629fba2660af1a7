#include "dpod/compensation.hpp"

#include "dpod/rng.hpp"

#include <benchmark/benchmark.h>

using namespace dpod;

namespace {

ComplexVec random_vec(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    ComplexVec v(n);
    for (cplx& z : v) z = rng.cgaussian(1.0);
    return v;
}

TrainingSet training_rows(std::size_t pairs, const MemorySpec& mem) {
    ComplexVec clean = random_vec(11, pairs);
    ComplexVec received = random_vec(12, pairs);
    return build_training_set(clean, received, mem);
}

void BM_KernelFit(benchmark::State& state) {
    const MemorySpec mem = MemorySpec::symmetric(2);
    const DegreeSet d = DegreeSet::odd_up_to(5);
    TrainingSet ts = training_rows(static_cast<std::size_t>(state.range(0)) / 2, mem);
    const double lambda = kernel_ridge_lambda(ts, d, 0.005);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_kernel(ts, d, lambda));
    }
}
BENCHMARK(BM_KernelFit)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_VolterraFit(benchmark::State& state) {
    const MemorySpec mem = MemorySpec::symmetric(2);
    const DegreeSet d = DegreeSet::odd_up_to(5);
    MonomialBasis basis = enumerate_monomials(2 * mem.depth(), d);
    TrainingSet ts = training_rows(static_cast<std::size_t>(state.range(0)) / 2, mem);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_volterra(ts, basis, 0.0));
    }
}
BENCHMARK(BM_VolterraFit)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_KernelCompensate(benchmark::State& state) {
    const MemorySpec mem = MemorySpec::symmetric(2);
    const DegreeSet d = DegreeSet::odd_up_to(5);
    TrainingSet ts = training_rows(static_cast<std::size_t>(state.range(0)) / 2, mem);
    Compensator model(fit_kernel(ts, d, kernel_ridge_lambda(ts, d, 0.005)));
    ComplexVec received = random_vec(13, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compensate(model, received, mem));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1024);
}
BENCHMARK(BM_KernelCompensate)->Arg(2048)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_VolterraCompensate(benchmark::State& state) {
    const MemorySpec mem = MemorySpec::symmetric(2);
    const DegreeSet d = DegreeSet::odd_up_to(5);
    TrainingSet ts = training_rows(4096, mem);
    MonomialBasis basis = enumerate_monomials(2 * mem.depth(), d);
    Compensator model(fit_volterra(ts, basis, 1e-8));
    ComplexVec received = random_vec(14, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compensate(model, received, mem));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1024);
}
BENCHMARK(BM_VolterraCompensate)->Unit(benchmark::kMillisecond);

void BM_MonomialFeatures(benchmark::State& state) {
    MonomialBasis basis = enumerate_monomials(10, DegreeSet::odd_up_to(5));
    Rng rng(15);
    RealVec y(10);
    for (double& v : y) v = rng.gaussian(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(monomial_features(y, basis));
    }
}
BENCHMARK(BM_MonomialFeatures);

}  // namespace
