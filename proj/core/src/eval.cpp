#include "freeflow/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "freeflow/errors.hpp"
#include "freeflow/rng.hpp"

namespace freeflow {

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw Error("regularized_incomplete_beta: a and b must be > 0");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    // Use the symmetry relation so the continued fraction converges fast.
    if (x > (a + 1.0) / (a + b + 2.0)) {
        return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
    }

    const double log_prefactor = a * std::log(x) + b * std::log1p(-x) -
                                 (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));

    // Modified Lentz evaluation of the standard continued fraction
    //   I_x(a,b) = prefactor / a * 1/(1 + d1/(1 + d2/(1 + ...)))
    // with d_{2m+1} = -(a+m)(a+b+m)x / ((a+2m)(a+2m+1))
    // and  d_{2m}   = m(b-m)x / ((a+2m-1)(a+2m)).
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);  // 1 + d1
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const double md = static_cast<double>(m);
        double numerator = md * (b - md) * x / ((a + 2.0 * md - 1.0) * (a + 2.0 * md));
        d = 1.0 + numerator * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        h *= d * c;

        numerator = -((a + md) * (a + b + md) * x) / ((a + 2.0 * md) * (a + 2.0 * md + 1.0));
        d = 1.0 + numerator * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            break;
        }
    }
    return std::exp(log_prefactor) * h / a;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw Error("student_t_two_sided_p: df must be > 0");
    }
    if (t == 0.0) {
        return 1.0;
    }
    const double x = df / (df + t * t);
    const double p = regularized_incomplete_beta(df / 2.0, 0.5, x);
    return std::clamp(p, 0.0, 1.0);
}

EvalReport evaluate(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size() || actual.empty()) {
        throw LengthMismatch("evaluate: prediction and actual vectors must have equal length >= 1");
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!(actual[i] > 0.0)) {
            throw NonPositiveActual("evaluate: actual value at index " + std::to_string(i) +
                                    " is not positive");
        }
    }

    const std::size_t n = actual.size();
    const double n_d = static_cast<double>(n);

    double sum_ape = 0.0;
    double sum_ae = 0.0;
    double sum_se = 0.0;
    double sum_d = 0.0;
    double sum_ratio = 0.0;
    double sum_actual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pred[i] - actual[i];
        sum_ape += std::abs(d) / actual[i];
        sum_ae += std::abs(d);
        sum_se += d * d;
        sum_d += d;
        sum_ratio += pred[i] / actual[i];
        sum_actual += actual[i];
    }

    EvalReport report;
    report.n = n;
    report.mape_pct = 100.0 * sum_ape / n_d;
    report.mae_s = sum_ae / n_d;
    report.mse_s2 = sum_se / n_d;
    report.delta_s = sum_d / n_d;
    report.apr = sum_ratio / n_d;

    const double mean_actual = sum_actual / n_d;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = actual[i] - mean_actual;
        ss_tot += dev * dev;
    }
    if (ss_tot == 0.0) {
        report.r2 = sum_se == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    } else {
        report.r2 = 1.0 - sum_se / ss_tot;
    }

    if (n == 1) {
        report.p_value = std::nullopt;
        return report;
    }
    double d_min = std::numeric_limits<double>::infinity();
    double d_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pred[i] - actual[i];
        d_min = std::min(d_min, d);
        d_max = std::max(d_max, d);
    }
    if (d_min == d_max) {
        report.p_value = d_min == 0.0 ? 1.0 : 0.0;
        return report;
    }
    const double mean_d = report.delta_s;
    double ss_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = (pred[i] - actual[i]) - mean_d;
        ss_d += dev * dev;
    }
    const double sd = std::sqrt(ss_d / (n_d - 1.0));
    const double t = mean_d / (sd / std::sqrt(n_d));
    report.p_value = student_t_two_sided_p(t, n_d - 1.0);
    return report;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw BadFraction("train_test_split: test_fraction must lie in (0, 1)");
    }
    if (n < 2) {
        throw TooFewSamples("train_test_split: need at least 2 samples");
    }
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    rng::SplitMix64 gen(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(gen.next_below(i + 1));
        std::swap(indices[i], indices[j]);
    }
    const std::size_t test_count =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction + 0.5));
    std::vector<std::size_t> test(indices.end() - static_cast<std::ptrdiff_t>(test_count),
                                  indices.end());
    indices.resize(n - test_count);
    return {std::move(indices), std::move(test)};
}

std::vector<double> kfold_cv(const Matrix& X, std::span<const double> y, const ForestParams& params,
                             int k, std::uint64_t seed, unsigned n_threads) {
    if (k < 2) {
        throw TooFewSamples("kfold_cv: k must be >= 2");
    }
    const std::size_t n = y.size();
    if (n < static_cast<std::size_t>(k)) {
        throw TooFewSamples("kfold_cv: need at least k samples, have " + std::to_string(n));
    }
    if (X.rows() != n) {
        throw DimensionMismatch("kfold_cv: X has " + std::to_string(X.rows()) + " rows but y has " +
                                std::to_string(n));
    }

    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    rng::SplitMix64 gen(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(gen.next_below(i + 1));
        std::swap(indices[i], indices[j]);
    }

    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t remainder = n % static_cast<std::size_t>(k);

    std::vector<double> fold_maes;
    fold_maes.reserve(static_cast<std::size_t>(k));
    std::size_t fold_start = 0;
    for (int fold = 0; fold < k; ++fold) {
        const std::size_t fold_size = base + (static_cast<std::size_t>(fold) < remainder ? 1 : 0);
        const std::size_t fold_end = fold_start + fold_size;

        Matrix X_train(n - fold_size, X.cols());
        std::vector<double> y_train;
        y_train.reserve(n - fold_size);
        Matrix X_val(fold_size, X.cols());
        std::vector<double> y_val;
        y_val.reserve(fold_size);

        std::size_t train_row = 0;
        std::size_t val_row = 0;
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::size_t i = indices[pos];
            const auto src = X.row(i);
            if (pos >= fold_start && pos < fold_end) {
                std::copy(src.begin(), src.end(), X_val.row(val_row++).begin());
                y_val.push_back(y[i]);
            } else {
                std::copy(src.begin(), src.end(), X_train.row(train_row++).begin());
                y_train.push_back(y[i]);
            }
        }

        ForestParams fold_params = params;
        fold_params.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(fold));
        const RegressionForest forest = fit_forest(X_train, y_train, fold_params, n_threads);
        const std::vector<double> pred = predict_forest(forest, X_val);

        double sum_ae = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            sum_ae += std::abs(pred[i] - y_val[i]);
        }
        fold_maes.push_back(sum_ae / static_cast<double>(pred.size()));
        fold_start = fold_end;
    }
    return fold_maes;
}

}  // namespace freeflow
