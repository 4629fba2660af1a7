#include "dpod/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace dpod;

namespace {

SimConfig bench_config() {
    SimConfig cfg = desk_preset();
    cfg.sweep.snr_db = {24.0};
    cfg.sweep.trials = 1;
    cfg.threads = 1;
    return cfg;
}

void BM_AmplifierChain(benchmark::State& state) {
    SimContext ctx(bench_config());
    Rng rng(21);
    BitVec bits = rng.bits(ctx.sc.data_size * ctx.constellation.bits_per_symbol);
    DomainSignal s_t = dfts_modulate(qam_map(bits, ctx.constellation), ctx.sc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(amplify(s_t, ctx.pa, ctx.pa_cfg));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(ctx.sc.fft_size));
}
BENCHMARK(BM_AmplifierChain)->Unit(benchmark::kMicrosecond);

void BM_FullTrial(benchmark::State& state) {
    SimContext ctx(bench_config());
    AlgorithmSpec none;
    none.id = "none";
    std::size_t trial = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(ctx, none, std::nullopt, 24.0, 0, 0, trial++));
    }
}
BENCHMARK(BM_FullTrial)->Unit(benchmark::kMicrosecond);

}  // namespace
