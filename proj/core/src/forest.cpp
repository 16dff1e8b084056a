#include "freeflow/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "freeflow/errors.hpp"

namespace freeflow {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return Matrix{};
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) {
            throw DimensionMismatch("Matrix::from_rows: ragged rows");
        }
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

namespace {

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double sse = std::numeric_limits<double>::infinity();
    double sse_left = 0.0;
    double sse_right = 0.0;
    std::size_t n_left = 0;
};

void validate_params(const ForestParams& p, std::size_t n_features) {
    if (p.n_trees < 1) {
        throw Error("forest params: n_trees must be >= 1");
    }
    if (p.max_depth < 0) {
        throw Error("forest params: max_depth must be >= 0");
    }
    if (p.min_samples_split < 2) {
        throw Error("forest params: min_samples_split must be >= 2");
    }
    if (p.max_features && (*p.max_features < 1 || static_cast<std::size_t>(*p.max_features) > n_features)) {
        throw DimensionMismatch("forest params: max_features must be in [1, feature count]");
    }
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const double> y, const ForestParams& params,
                rng::SplitMix64& rng)
        : X_(X), y_(y), params_(params), rng_(rng) {}

    Tree build() {
        Tree tree;
        tree.importance_raw.assign(X_.cols(), 0.0);

        std::vector<std::size_t> indices(y_.size());
        std::iota(indices.begin(), indices.end(), 0);
        n_root_ = indices.size();
        tree_ = &tree;
        build_node(indices, 0);
        return tree;
    }

private:
    std::int32_t build_node(std::span<std::size_t> indices, int depth) {
        const std::size_t n = indices.size();
        double sum = 0.0;
        double sum_sq = 0.0;
        double y_min = std::numeric_limits<double>::infinity();
        double y_max = -std::numeric_limits<double>::infinity();
        for (const std::size_t i : indices) {
            sum += y_[i];
            sum_sq += y_[i] * y_[i];
            y_min = std::min(y_min, y_[i]);
            y_max = std::max(y_max, y_[i]);
        }
        const double mean = sum / static_cast<double>(n);
        const double parent_sse = std::max(0.0, sum_sq - sum * sum / static_cast<double>(n));

        const bool stop = depth >= params_.max_depth ||
                          n < static_cast<std::size_t>(params_.min_samples_split) || y_min == y_max;
        BestSplit best;
        if (!stop) {
            best = find_best_split(indices, sum, sum_sq);
        }
        if (!best.found || !(best.sse < parent_sse)) {
            return push_leaf(mean, n);
        }

        // Weighted impurity decrease for MDI, with var = SSE / n.
        const double n_d = static_cast<double>(n);
        const double var_parent = parent_sse / n_d;
        const double var_left = best.sse_left / static_cast<double>(best.n_left);
        const double var_right = best.sse_right / static_cast<double>(n - best.n_left);
        const double frac_left = static_cast<double>(best.n_left) / n_d;
        const double decrease =
            (n_d / static_cast<double>(n_root_)) *
            (var_parent - frac_left * var_left - (1.0 - frac_left) * var_right);
        tree_->importance_raw[best.feature] += std::max(0.0, decrease);

        const auto mid = std::partition(indices.begin(), indices.end(), [&](std::size_t i) {
            return X_.at(i, best.feature) <= best.threshold;
        });
        const std::size_t n_left = static_cast<std::size_t>(mid - indices.begin());

        const std::int32_t node_pos = static_cast<std::int32_t>(tree_->nodes.size());
        tree_->nodes.push_back(TreeNode{static_cast<std::int32_t>(best.feature), best.threshold,
                                        -1, -1, 0.0, 0});
        const std::int32_t left = build_node(indices.subspan(0, n_left), depth + 1);
        const std::int32_t right = build_node(indices.subspan(n_left), depth + 1);
        tree_->nodes[node_pos].left = left;
        tree_->nodes[node_pos].right = right;
        return node_pos;
    }

    std::int32_t push_leaf(double mean, std::size_t n) {
        const std::int32_t pos = static_cast<std::int32_t>(tree_->nodes.size());
        tree_->nodes.push_back(TreeNode{-1, 0.0, -1, -1, mean, static_cast<std::uint32_t>(n)});
        return pos;
    }

    BestSplit find_best_split(std::span<const std::size_t> indices, double sum, double sum_sq) {
        const std::size_t n_features = X_.cols();
        const std::size_t m = params_.max_features
                                  ? static_cast<std::size_t>(*params_.max_features)
                                  : n_features;

        feature_buf_.resize(n_features);
        std::iota(feature_buf_.begin(), feature_buf_.end(), 0);
        if (m < n_features) {
            // Partial Fisher-Yates: the first m entries become the subset.
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t j = i + rng_.next_below(n_features - i);
                std::swap(feature_buf_[i], feature_buf_[j]);
            }
            std::sort(feature_buf_.begin(), feature_buf_.begin() + static_cast<std::ptrdiff_t>(m));
        }

        const std::size_t n = indices.size();
        BestSplit best;
        for (std::size_t fi = 0; fi < m; ++fi) {
            const std::size_t f = feature_buf_[fi];
            sorted_.clear();
            sorted_.reserve(n);
            for (const std::size_t i : indices) {
                sorted_.push_back({X_.at(i, f), y_[i]});
            }
            std::sort(sorted_.begin(), sorted_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (sorted_.front().first == sorted_.back().first) {
                continue;  // constant feature
            }

            double sum_left = 0.0;
            double sum_sq_left = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                sum_left += sorted_[i].second;
                sum_sq_left += sorted_[i].second * sorted_[i].second;
                const double v = sorted_[i].first;
                const double v_next = sorted_[i + 1].first;
                if (v == v_next) {
                    continue;
                }
                const double threshold = 0.5 * (v + v_next);
                if (!(threshold < v_next)) {
                    continue;  // adjacent doubles rounded up; no separating value
                }
                const double n_left = static_cast<double>(i + 1);
                const double n_right = static_cast<double>(n - i - 1);
                const double sum_right = sum - sum_left;
                const double sse_left = std::max(0.0, sum_sq_left - sum_left * sum_left / n_left);
                const double sse_right =
                    std::max(0.0, (sum_sq - sum_sq_left) - sum_right * sum_right / n_right);
                const double sse = sse_left + sse_right;
                if (sse < best.sse) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = threshold;
                    best.sse = sse;
                    best.sse_left = sse_left;
                    best.sse_right = sse_right;
                    best.n_left = i + 1;
                }
            }
        }
        return best;
    }

    const Matrix& X_;
    std::span<const double> y_;
    const ForestParams& params_;
    rng::SplitMix64& rng_;
    Tree* tree_ = nullptr;
    std::size_t n_root_ = 0;
    std::vector<std::size_t> feature_buf_;
    std::vector<std::pair<double, double>> sorted_;
};

}  // namespace

Tree fit_tree(const Matrix& X, std::span<const double> y, const ForestParams& params,
              rng::SplitMix64& rng) {
    if (y.empty()) {
        throw EmptyTrainingSet("fit_tree: no training samples");
    }
    if (X.rows() != y.size()) {
        throw DimensionMismatch("fit_tree: X has " + std::to_string(X.rows()) + " rows but y has " +
                                std::to_string(y.size()));
    }
    if (X.cols() == 0) {
        throw DimensionMismatch("fit_tree: X has no feature columns");
    }
    validate_params(params, X.cols());
    return TreeBuilder(X, y, params, rng).build();
}

double predict_tree(const Tree& tree, std::span<const double> row) {
    const TreeNode* node = &tree.nodes.front();
    while (!node->is_leaf()) {
        node = &tree.nodes[static_cast<std::size_t>(
            row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                            : node->right)];
    }
    return node->value;
}

RegressionForest fit_forest(const Matrix& X, std::span<const double> y, const ForestParams& params,
                            unsigned n_threads) {
    if (y.empty()) {
        throw EmptyTrainingSet("fit_forest: no training samples");
    }
    if (X.rows() != y.size()) {
        throw DimensionMismatch("fit_forest: X has " + std::to_string(X.rows()) +
                                " rows but y has " + std::to_string(y.size()));
    }
    if (X.cols() == 0) {
        throw DimensionMismatch("fit_forest: X has no feature columns");
    }
    validate_params(params, X.cols());

    RegressionForest forest;
    forest.params = params;
    forest.feature_names.reserve(X.cols());
    for (std::size_t c = 0; c < X.cols(); ++c) {
        forest.feature_names.push_back("f" + std::to_string(c));
    }
    const std::size_t n_trees = static_cast<std::size_t>(params.n_trees);
    forest.trees.resize(n_trees);

    const std::size_t n = y.size();
    const auto fit_one = [&](std::size_t t) {
        rng::SplitMix64 tree_rng(rng::derive_seed(params.seed, t));
        if (params.bootstrap) {
            Matrix Xb(n, X.cols());
            std::vector<double> yb(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = static_cast<std::size_t>(tree_rng.next_below(n));
                const auto src = X.row(j);
                std::copy(src.begin(), src.end(), Xb.row(i).begin());
                yb[i] = y[j];
            }
            forest.trees[t] = fit_tree(Xb, yb, params, tree_rng);
        } else {
            forest.trees[t] = fit_tree(X, y, params, tree_rng);
        }
    };

    unsigned workers = n_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n_threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_trees));
    if (workers <= 1) {
        for (std::size_t t = 0; t < n_trees; ++t) {
            fit_one(t);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= n_trees) {
                        return;
                    }
                    fit_one(t);
                }
            });
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }
    return forest;
}

std::vector<double> predict_forest(const RegressionForest& forest, const Matrix& X) {
    if (X.rows() == 0) {
        return {};
    }
    if (X.cols() != forest.feature_names.size()) {
        throw DimensionMismatch("predict_forest: expected " +
                                std::to_string(forest.feature_names.size()) + " features, got " +
                                std::to_string(X.cols()));
    }
    std::vector<double> predictions(X.rows());
    const double n_trees = static_cast<double>(forest.trees.size());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double sum = 0.0;
        for (const Tree& tree : forest.trees) {
            sum += predict_tree(tree, X.row(r));
        }
        predictions[r] = sum / n_trees;
    }
    return predictions;
}

ImportanceResult mdi_importance(const RegressionForest& forest) {
    const std::size_t k = forest.feature_names.size();
    ImportanceResult result;
    result.weights.assign(k, 0.0);

    for (const Tree& tree : forest.trees) {
        for (std::size_t f = 0; f < k && f < tree.importance_raw.size(); ++f) {
            result.weights[f] += tree.importance_raw[f];
        }
    }
    const double n_trees = static_cast<double>(forest.trees.size());
    for (double& w : result.weights) {
        w /= n_trees;
    }
    const double total = std::accumulate(result.weights.begin(), result.weights.end(), 0.0);
    if (total <= 0.0) {
        result.no_splits = true;
        std::fill(result.weights.begin(), result.weights.end(), 0.0);
        return result;
    }
    for (double& w : result.weights) {
        w /= total;
    }
    return result;
}

}  // namespace freeflow
