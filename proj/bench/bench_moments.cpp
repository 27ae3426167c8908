#include <benchmark/benchmark.h>

#include "trellis/codes.hpp"
#include "trellis/distribution.hpp"
#include "trellis/moments.hpp"

using namespace trellis;

namespace {

// 64-state code, wide enough that each layer has work to share.
const Trellis& wide_trellis()
{
    static const Trellis t = build_conv_trellis(parse_generators("133,171"), 500, true);
    return t;
}

void BM_serial_reference(benchmark::State& state)
{
    const auto& t = wide_trellis();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto order = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reference::numerators<RealSemiring>(t, g, order, Direction::forward));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.num_edges()));
}

void BM_parallel_kernel(benchmark::State& state)
{
    const auto& t = wide_trellis();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto order = static_cast<unsigned>(state.range(0));
    const RunOptions options{static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(forward_numerators<RealSemiring>(t, g, order, options));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.num_edges()));
}

void BM_exact_distribution(benchmark::State& state)
{
    const auto& t = wide_trellis();
    const auto g = DepthFunctionTable::from_clabels(t);
    const RunOptions options{static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(exact_distributions(t, g, Direction::forward, options));
}

} // namespace

BENCHMARK(BM_serial_reference)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel_kernel)
    ->ArgsProduct({{0, 2, 4}, {1, 2, 4, 8}})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exact_distribution)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
