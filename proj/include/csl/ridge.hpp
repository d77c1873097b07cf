#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "csl/errors.hpp"
#include "csl/matrix.hpp"

namespace csl {

struct RidgeConfig {
    double l2_penalty = 1.0;
    std::size_t max_iterations = 1; // direct solver: kept for config compatibility
    double tolerance = 1e-8;
};

// Linear least squares with an L2 penalty on the weights (never on the
// intercept). Features and target are centered, so the intercept is the
// target mean and l2 -> infinity shrinks predictions to that mean.
class RidgeModel {
public:
    RidgeModel() = default;

    static RidgeModel fit(const std::vector<std::vector<double>>& columns,
                          const std::vector<double>& target, const RidgeConfig& cfg) {
        if (!(cfg.l2_penalty >= 0.0)) {
            throw InvalidConfig("l2_penalty must be nonnegative");
        }
        const std::size_t n = target.size();
        if (n == 0) {
            throw TooFewUnits("ridge fit needs at least one row");
        }
        for (const auto& col : columns) {
            if (col.size() != n) {
                throw LengthMismatch("feature column vs target length");
            }
        }
        const std::size_t k = columns.size();
        RidgeModel m;
        m.feature_means_.resize(k);
        m.weights_.assign(k, 0.0);

        double ysum = 0.0;
        for (double v : target) {
            ysum += v;
        }
        m.intercept_ = ysum / static_cast<double>(n);
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (double v : columns[j]) {
                s += v;
            }
            m.feature_means_[j] = s / static_cast<double>(n);
        }
        if (k == 0) {
            return m;
        }

        Matrix gram(k, k);
        std::vector<double> rhs(k, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    s += (columns[a][i] - m.feature_means_[a]) *
                         (columns[b][i] - m.feature_means_[b]);
                }
                gram(a, b) = gram(b, a) = s;
            }
            gram(a, a) += cfg.l2_penalty;
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += (columns[a][i] - m.feature_means_[a]) * (target[i] - m.intercept_);
            }
            rhs[a] = s;
        }
        m.weights_ = detail::solve_spd(gram, rhs);
        return m;
    }

    double predict_row(const std::vector<double>& row) const {
        if (row.size() != weights_.size()) {
            throw DimensionMismatch("ridge expects " + std::to_string(weights_.size()) +
                                    " features, got " + std::to_string(row.size()));
        }
        double p = intercept_;
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            p += weights_[j] * (row[j] - feature_means_[j]);
        }
        return p;
    }

    std::vector<double> predict(const std::vector<std::vector<double>>& columns) const {
        if (columns.size() != weights_.size()) {
            throw DimensionMismatch("ridge expects " + std::to_string(weights_.size()) +
                                    " feature columns, got " + std::to_string(columns.size()));
        }
        const std::size_t n = columns.empty() ? 0 : columns[0].size();
        std::vector<double> out(n, intercept_);
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != n) {
                throw LengthMismatch("ragged feature columns");
            }
            const double mean = feature_means_[j];
            const double w = weights_[j];
            for (std::size_t i = 0; i < n; ++i) {
                out[i] += w * (columns[j][i] - mean);
            }
        }
        return out;
    }

    const std::vector<double>& weights() const noexcept { return weights_; }
    double intercept() const noexcept { return intercept_; }
    std::size_t feature_count() const noexcept { return weights_.size(); }

private:
    std::vector<double> weights_;
    std::vector<double> feature_means_;
    double intercept_ = 0.0;
};

} // namespace csl
