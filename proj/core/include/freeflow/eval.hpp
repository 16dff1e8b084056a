#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "freeflow/forest.hpp"

namespace freeflow {

struct ReferenceObservation {
    std::int64_t pair_id = 0;
    double actual_s = 0.0;  // > 0
};

/// Accuracy report for a paired prediction set.
/// delta_s is mean(prediction - actual); p_value the two-sided paired
/// one-sample t-test of the differences against 0 (nullopt when n == 1).
struct EvalReport {
    std::size_t n = 0;
    double mape_pct = 0.0;
    double mae_s = 0.0;
    double mse_s2 = 0.0;
    double delta_s = 0.0;
    std::optional<double> p_value;
    double apr = 0.0;
    double r2 = 0.0;
};

/// MAPE/MAE/MSE/delta/APR/R-squared plus the bias t-test.
/// Degenerate differences: identically zero -> p = 1; constant non-zero ->
/// p = 0. Throws LengthMismatch / NonPositiveActual.
EvalReport evaluate(std::span<const double> pred, std::span<const double> actual);

/// Seeded uniform shuffle of 0..n-1; the last floor(n * test_fraction + 0.5)
/// positions become the test set. Returns (train, test) index lists.
/// Throws BadFraction / TooFewSamples.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    std::size_t n, double test_fraction, std::uint64_t seed);

/// k-fold cross-validation MAE, one value per fold in fold order. Indices
/// are shuffled with seed and cut into k contiguous folds whose sizes
/// differ by at most 1; fold i is validated against a forest fitted on the
/// rest with seed rng::derive_seed(seed, i) (params.seed is not used here).
/// Throws TooFewSamples.
std::vector<double> kfold_cv(const Matrix& X, std::span<const double> y,
                             const ForestParams& params, int k, std::uint64_t seed,
                             unsigned n_threads = 1);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with df degrees of freedom,
/// evaluated exactly via the regularized incomplete beta.
double student_t_two_sided_p(double t, double df);

}  // namespace freeflow
