#include "tmsched/combinatorics.hpp"
#include "tmsched/random.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace {

using namespace tmsched;

void BM_SetFamily(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto f = build_set_family(n);
        benchmark::DoNotOptimize(verify_set_family(f));
    }
}
BENCHMARK(BM_SetFamily)->Arg(8)->Arg(64);

ConflictGraph random_graph(int n, std::uint64_t num, std::uint64_t den)
{
    Rng rng(11);
    ConflictGraph g(n);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.chance(num, den)) {
                g.add_edge(u, v);
            }
        }
    }
    return g;
}

void BM_PrimaryGreedy(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto g = random_graph(n, 3, 10);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(primary_greedy_coloring(g, order));
    }
}
BENCHMARK(BM_PrimaryGreedy)->Arg(50)->Arg(500);

void BM_AlternativeGreedy(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto g = random_graph(n, 3, 10);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(alternative_greedy_coloring(g, order));
    }
}
BENCHMARK(BM_AlternativeGreedy)->Arg(50)->Arg(500);

}  // namespace
