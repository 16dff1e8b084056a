#include <benchmark/benchmark.h>

#include <vector>

#include "freeflow/forest.hpp"
#include "freeflow/rng.hpp"

namespace {

using namespace freeflow;

struct Dataset {
    Matrix X;
    std::vector<double> y;
};

Dataset make_dataset(std::size_t rows) {
    rng::SplitMix64 gen(5);
    Dataset data;
    data.X = Matrix(rows, 11);
    data.y.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t f = 0; f < 11; ++f) {
            data.X.at(i, f) = f == 0 ? 600.0 * gen.next_double()
                                     : static_cast<double>(gen.next_below(6));
        }
        data.y[i] = 1.1 * data.X.at(i, 0) + 25.0 * data.X.at(i, 1) + 10.0 * data.X.at(i, 6) +
                    10.0 * gen.next_double();
    }
    return data;
}

void BM_fit_forest(benchmark::State& state) {
    const Dataset data = make_dataset(static_cast<std::size_t>(state.range(0)));
    ForestParams params;
    params.n_trees = static_cast<int>(state.range(1));
    params.max_depth = 10;
    params.seed = 42;
    for (auto _ : state) {
        RegressionForest forest = fit_forest(data.X, data.y, params);
        benchmark::DoNotOptimize(forest);
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_fit_forest)->Args({500, 25})->Args({2400, 25})->Unit(benchmark::kMillisecond);

void BM_predict_forest(benchmark::State& state) {
    const Dataset data = make_dataset(2000);
    ForestParams params;
    params.n_trees = 100;
    params.max_depth = 10;
    params.seed = 42;
    const RegressionForest forest = fit_forest(data.X, data.y, params);
    for (auto _ : state) {
        auto predictions = predict_forest(forest, data.X);
        benchmark::DoNotOptimize(predictions);
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_predict_forest)->Unit(benchmark::kMillisecond);

void BM_fit_tree(benchmark::State& state) {
    const Dataset data = make_dataset(static_cast<std::size_t>(state.range(0)));
    ForestParams params;
    params.n_trees = 1;
    params.max_depth = 10;
    params.bootstrap = false;
    for (auto _ : state) {
        rng::SplitMix64 gen(3);
        Tree tree = fit_tree(data.X, data.y, params, gen);
        benchmark::DoNotOptimize(tree);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_fit_tree)->Range(256, 4096)->Complexity();

}  // namespace

BENCHMARK_MAIN();
