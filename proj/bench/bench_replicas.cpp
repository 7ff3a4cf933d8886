// Serial reference vs OpenMP replica driver on the same per-replica kernels.
#include <benchmark/benchmark.h>

#include "hcb/counts.hpp"
#include "hcb/harness.hpp"
#include "hcb/replicas.hpp"

namespace {

auto endpoint_kernel(std::size_t n) {
    return [n](std::uint64_t i) {
        hcb::TrajectoryOptions opt;
        opt.backward_cap = 16 * n;
        return hcb::endpoint_counts(n, 42, i, opt).D;
    };
}

void BM_endpoints_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hcb::run_replicas_serial(64, endpoint_kernel(n)));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_endpoints_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hcb::run_replicas_parallel(64, endpoint_kernel(n)));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_hitting_law(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(hcb::hitting_law_mc(7, 100000, 20, 1 << 20, parallel));
    state.SetItemsProcessed(state.iterations() * 100000);
    state.SetLabel(parallel ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_endpoints_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_endpoints_parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_hitting_law)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
