#include <benchmark/benchmark.h>

#include <cmath>

#include "saer/experiment.hpp"
#include "saer/protocol.hpp"
#include "saer/theory.hpp"

using namespace saer;

namespace {

std::uint32_t degree_for(std::uint32_t n) {
    const double log_n = std::log(static_cast<double>(n));
    return static_cast<std::uint32_t>(std::ceil(9.0 * log_n * log_n));
}

void BM_GenerateRegular(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto g = generate_regular(n, 60, seed++);
        benchmark::DoNotOptimize(g.edge_count());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GenerateRegular)->RangeMultiplier(2)->Range(512, 4096)->Complexity();

void BM_GenerateAlmostRegular(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto g = generate_almost_regular(n, 48, 2.0, 0.05, seed++);
        benchmark::DoNotOptimize(g.edge_count());
    }
}
BENCHMARK(BM_GenerateAlmostRegular)->Arg(1024)->Arg(4096);

void BM_SaerRun(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto level = state.range(1) ? MetricsLevel::Full : MetricsLevel::Light;
    const auto g = generate_regular(n, 60, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Simulation sim(g, ProtocolKind::Saer, 8, 2, seed++, level);
        auto result = sim.run_to_completion(Simulation::default_max_rounds(n));
        benchmark::DoNotOptimize(result.work);
    }
}
BENCHMARK(BM_SaerRun)->ArgsProduct({{1024, 4096}, {0, 1}})
    ->ArgNames({"n", "full_metrics"});

void BM_SaerFirstRound(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto g = generate_regular(n, degree_for(n), 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Simulation sim(g, ProtocolKind::Saer, 32, 1, seed++);
        benchmark::DoNotOptimize(sim.step().accepted);
    }
}
BENCHMARK(BM_SaerFirstRound)->Arg(4096);

void BM_Envelope(benchmark::State& state) {
    TheoryParams params;
    params.n = 4096;
    params.d = 1;
    params.c = 32;
    params.eta = 9.0;
    params.delta_min_c = 623;
    params.delta_max_s = 623;
    for (auto _ : state) {
        auto env = envelope(params);
        benchmark::DoNotOptimize(env.stage1_horizon);
    }
}
BENCHMARK(BM_Envelope);

}  // namespace

BENCHMARK_MAIN();
