#include <benchmark/benchmark.h>

#include <map>

#include "freeflow/network.hpp"
#include "freeflow/routing.hpp"
#include "freeflow/synth.hpp"

namespace {

using namespace freeflow;

const RoadNetwork& grid_of(int side) {
    static std::map<int, RoadNetwork> cache;
    auto it = cache.find(side);
    if (it == cache.end()) {
        it = cache.emplace(side, grid_network(side, side, 7)).first;
    }
    return it->second;
}

void BM_shortest_path(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const RoadNetwork& net = grid_of(side);
    const NodeId corner = 0;
    const NodeId opposite = static_cast<NodeId>(side * side - 1);
    for (auto _ : state) {
        Route route = shortest_path(net, corner, opposite);
        benchmark::DoNotOptimize(route);
    }
    state.SetComplexityN(side * side);
}
BENCHMARK(BM_shortest_path)->Arg(10)->Arg(20)->Arg(40)->Complexity();

void BM_sample_od_pairs(benchmark::State& state) {
    const RoadNetwork& net = grid_of(20);
    for (auto _ : state) {
        auto pairs = sample_od_pairs(net, static_cast<std::size_t>(state.range(0)), 11);
        benchmark::DoNotOptimize(pairs);
    }
}
BENCHMARK(BM_sample_od_pairs)->Arg(100)->Arg(3000);

void BM_largest_scc(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const RoadNetwork& net = grid_of(side);
    for (auto _ : state) {
        RoadNetwork reduced = largest_scc(net);
        benchmark::DoNotOptimize(reduced);
    }
}
BENCHMARK(BM_largest_scc)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
