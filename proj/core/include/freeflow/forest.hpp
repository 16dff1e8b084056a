#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeflow/rng.hpp"

namespace freeflow {

/// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct ForestParams {
    int n_trees = 400;
    int max_depth = 10;
    int min_samples_split = 2;
    /// Features considered per split; nullopt means all of them.
    std::optional<int> max_features;
    bool bootstrap = true;
    std::uint64_t seed = 0;

    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Flat tree node. feature < 0 marks a leaf carrying (value, n); internal
/// nodes route x to the left child iff x[feature] <= threshold.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
    std::uint32_t n = 0;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;        // nodes[0] is the root
    std::vector<double> importance_raw;  // per-feature impurity decrease sums
};

struct RegressionForest {
    ForestParams params;
    std::vector<Tree> trees;
    std::vector<std::string> feature_names;
};

/// Fit one variance-minimizing CART regression tree. Split candidates are
/// midpoints of consecutive sorted distinct values per feature; the split
/// minimizing the summed child SSE wins, ties by lowest feature index then
/// lowest threshold. Recursion stops at max_depth, below min_samples_split,
/// on zero target variance, or when no split improves.
/// When max_features restricts the search, each node draws its feature
/// subset without replacement from rng; with all features allowed no draw
/// is made. Throws EmptyTrainingSet / DimensionMismatch.
Tree fit_tree(const Matrix& X, std::span<const double> y, const ForestParams& params,
              rng::SplitMix64& rng);

double predict_tree(const Tree& tree, std::span<const double> row);

/// Bootstrap ensemble. Tree t uses the stream seeded with
/// rng::derive_seed(params.seed, t); it first draws |y| bootstrap indices
/// (identity sample when bootstrap is false), then fits on that sample.
/// Trees may be fitted concurrently (n_threads, 0 = hardware concurrency);
/// the ensemble is always assembled in tree-index order.
RegressionForest fit_forest(const Matrix& X, std::span<const double> y, const ForestParams& params,
                            unsigned n_threads = 1);

/// Per-row arithmetic mean over trees. Throws DimensionMismatch.
std::vector<double> predict_forest(const RegressionForest& forest, const Matrix& X);

struct ImportanceResult {
    std::vector<double> weights;  // normalized to sum 1, or all zero
    bool no_splits = false;
};

/// Mean-decrease-in-impurity importance: per-split weighted variance
/// reductions accumulated per feature, averaged over trees, normalized to
/// sum 1. A forest with no splits at all yields zeros and no_splits = true.
ImportanceResult mdi_importance(const RegressionForest& forest);

/// Candidate lists for random_search; every list must be non-empty.
struct ParamSpace {
    std::vector<int> n_trees{400};
    std::vector<int> max_depth{10};
    std::vector<int> min_samples_split{2};
    std::vector<std::optional<int>> max_features{std::nullopt};
    std::vector<bool> bootstrap{true};
};

struct SearchResult {
    ForestParams best;
    double best_cv_mae = 0.0;
};

/// Randomized hyperparameter search: budget configurations sampled
/// uniformly and independently per parameter list (one seeded stream;
/// draw order n_trees, max_depth, min_samples_split, max_features,
/// bootstrap), each scored by k-fold CV mean MAE with the same fold seed so
/// every configuration sees identical folds. Ties keep the first sampled.
/// Throws EmptySpace.
SearchResult random_search(const Matrix& X, std::span<const double> y, const ParamSpace& space,
                           int budget, int folds, std::uint64_t seed, unsigned n_threads = 1);

}  // namespace freeflow
