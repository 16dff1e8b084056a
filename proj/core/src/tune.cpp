#include <numeric>

#include "freeflow/errors.hpp"
#include "freeflow/eval.hpp"
#include "freeflow/forest.hpp"
#include "freeflow/rng.hpp"

namespace freeflow {

SearchResult random_search(const Matrix& X, std::span<const double> y, const ParamSpace& space,
                           int budget, int folds, std::uint64_t seed, unsigned n_threads) {
    if (space.n_trees.empty() || space.max_depth.empty() || space.min_samples_split.empty() ||
        space.max_features.empty() || space.bootstrap.empty()) {
        throw EmptySpace("random_search: every candidate list must be non-empty");
    }
    if (budget < 1) {
        throw Error("random_search: budget must be >= 1");
    }

    rng::SplitMix64 gen(seed);
    SearchResult result;
    double best_mae = 0.0;
    bool have_best = false;

    for (int i = 0; i < budget; ++i) {
        ForestParams candidate;
        candidate.n_trees = space.n_trees[gen.next_below(space.n_trees.size())];
        candidate.max_depth = space.max_depth[gen.next_below(space.max_depth.size())];
        candidate.min_samples_split =
            space.min_samples_split[gen.next_below(space.min_samples_split.size())];
        candidate.max_features = space.max_features[gen.next_below(space.max_features.size())];
        candidate.bootstrap = space.bootstrap[gen.next_below(space.bootstrap.size())];
        candidate.seed = seed;

        // The same fold seed for every configuration keeps the comparison
        // on identical partitions.
        const std::vector<double> fold_maes = kfold_cv(X, y, candidate, folds, seed, n_threads);
        const double mae = std::accumulate(fold_maes.begin(), fold_maes.end(), 0.0) /
                           static_cast<double>(fold_maes.size());

        if (!have_best || mae < best_mae) {
            have_best = true;
            best_mae = mae;
            result.best = candidate;
        }
    }
    result.best_cv_mae = best_mae;
    return result;
}

}  // namespace freeflow
