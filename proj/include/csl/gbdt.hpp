#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "csl/errors.hpp"

namespace csl {

struct GbdtConfig {
    std::size_t tree_count = 200;
    std::size_t max_depth = 4;
    double learning_rate = 0.1;
    std::size_t min_leaf = 20;
    std::size_t histogram_bins = 64;
};

// Histogram gradient boosting for squared loss. Deterministic: quantile
// binning, no subsampling, and exact split ties broken toward the lowest
// feature index and then the lowest threshold.
class GbdtModel {
    struct Node {
        std::int32_t feature = -1; // -1 marks a leaf
        double threshold = 0.0;    // go left when x[feature] <= threshold
        std::int32_t left = -1;
        std::int32_t right = -1;
        double value = 0.0;
    };

public:
    GbdtModel() = default;

    static GbdtModel fit(const std::vector<std::vector<double>>& columns,
                         const std::vector<double>& target, const GbdtConfig& cfg) {
        if (cfg.tree_count < 1 || cfg.learning_rate <= 0.0 || cfg.min_leaf < 1 ||
            cfg.histogram_bins < 2 || cfg.histogram_bins > 60000) {
            throw InvalidConfig("gbdt hyperparameters out of range");
        }
        const std::size_t n = target.size();
        if (n == 0) {
            throw TooFewUnits("gbdt fit needs at least one row");
        }
        for (const auto& col : columns) {
            if (col.size() != n) {
                throw LengthMismatch("feature column vs target length");
            }
        }
        const std::size_t k = columns.size();

        GbdtModel m;
        m.feature_count_ = k;
        m.learning_rate_ = cfg.learning_rate;
        double ysum = 0.0;
        for (double v : target) {
            ysum += v;
        }
        m.bias_ = ysum / static_cast<double>(n);

        // Quantile bin thresholds per feature; bin index = count of
        // thresholds strictly below x, so "x <= threshold[b]" splits bins
        // {0..b} from the rest.
        std::vector<std::vector<std::uint16_t>> bins(k);
        m.thresholds_.assign(k, {});
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<double> sorted = columns[j];
            std::sort(sorted.begin(), sorted.end());
            std::vector<double>& thr = m.thresholds_[j];
            for (std::size_t b = 1; b < cfg.histogram_bins; ++b) {
                const std::size_t pos = b * n / cfg.histogram_bins;
                if (pos >= n) {
                    break;
                }
                const double v = sorted[pos];
                if (thr.empty() || v > thr.back()) {
                    thr.push_back(v);
                }
            }
            bins[j].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                bins[j][i] = static_cast<std::uint16_t>(
                    std::lower_bound(thr.begin(), thr.end(), columns[j][i]) - thr.begin());
            }
        }

        std::vector<double> residual(target);
        std::vector<double> score(n, 0.0);
        std::vector<std::size_t> order(n);
        m.training_mse_.reserve(cfg.tree_count);

        for (std::size_t round = 0; round < cfg.tree_count; ++round) {
            for (std::size_t i = 0; i < n; ++i) {
                residual[i] = target[i] - (m.bias_ + score[i]);
                order[i] = i;
            }
            std::vector<Node> tree;
            m.build_tree(tree, columns, bins, residual, order, 0,
                         static_cast<std::size_t>(n), 0, cfg);
            for (std::size_t i = 0; i < n; ++i) {
                score[i] += cfg.learning_rate * m.eval_tree(tree, columns, i);
            }
            m.trees_.push_back(std::move(tree));

            double sse = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = target[i] - (m.bias_ + score[i]);
                sse += r * r;
            }
            m.training_mse_.push_back(sse / static_cast<double>(n));
        }
        return m;
    }

    double predict_row(const std::vector<double>& row) const {
        if (row.size() != feature_count_) {
            throw DimensionMismatch("gbdt expects " + std::to_string(feature_count_) +
                                    " features, got " + std::to_string(row.size()));
        }
        double p = bias_;
        for (const auto& tree : trees_) {
            std::int32_t at = 0;
            while (tree[static_cast<std::size_t>(at)].feature >= 0) {
                const Node& nd = tree[static_cast<std::size_t>(at)];
                at = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                               : nd.right;
            }
            p += learning_rate_ * tree[static_cast<std::size_t>(at)].value;
        }
        return p;
    }

    std::vector<double> predict(const std::vector<std::vector<double>>& columns) const {
        if (columns.size() != feature_count_) {
            throw DimensionMismatch("gbdt expects " + std::to_string(feature_count_) +
                                    " feature columns, got " + std::to_string(columns.size()));
        }
        const std::size_t n = columns.empty() ? 0 : columns[0].size();
        for (const auto& col : columns) {
            if (col.size() != n) {
                throw LengthMismatch("ragged feature columns");
            }
        }
        std::vector<double> out(n);
        std::vector<double> row(feature_count_);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < feature_count_; ++j) {
                row[j] = columns[j][i];
            }
            out[i] = predict_row(row);
        }
        return out;
    }

    const std::vector<double>& training_mse() const noexcept { return training_mse_; }
    std::size_t feature_count() const noexcept { return feature_count_; }
    std::size_t tree_count() const noexcept { return trees_.size(); }
    double bias() const noexcept { return bias_; }

private:
    // Recursively grows nodes over order[begin, end); returns the node index.
    std::int32_t build_tree(std::vector<Node>& tree,
                            const std::vector<std::vector<double>>& columns,
                            const std::vector<std::vector<std::uint16_t>>& bins,
                            const std::vector<double>& residual,
                            std::vector<std::size_t>& order, std::size_t begin,
                            std::size_t end, std::size_t depth, const GbdtConfig& cfg) {
        const std::size_t count = end - begin;
        double sum = 0.0;
        for (std::size_t r = begin; r < end; ++r) {
            sum += residual[order[r]];
        }
        const std::int32_t id = static_cast<std::int32_t>(tree.size());
        tree.push_back({});
        tree[static_cast<std::size_t>(id)].value = sum / static_cast<double>(count);

        if (depth >= cfg.max_depth || count < 2 * cfg.min_leaf) {
            return id;
        }

        const double parent_term = sum * sum / static_cast<double>(count);
        double best_gain = 1e-12;
        std::size_t best_feature = 0, best_bin = 0;
        bool found = false;
        std::vector<double> bin_sum;
        std::vector<std::size_t> bin_count;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const std::size_t nb = m_bins(j);
            if (nb < 2) {
                continue;
            }
            bin_sum.assign(nb, 0.0);
            bin_count.assign(nb, 0);
            for (std::size_t r = begin; r < end; ++r) {
                const std::size_t i = order[r];
                bin_sum[bins[j][i]] += residual[i];
                bin_count[bins[j][i]] += 1;
            }
            double left_sum = 0.0;
            std::size_t left_count = 0;
            for (std::size_t b = 0; b + 1 < nb; ++b) {
                left_sum += bin_sum[b];
                left_count += bin_count[b];
                const std::size_t right_count = count - left_count;
                if (left_count < cfg.min_leaf || right_count < cfg.min_leaf) {
                    continue;
                }
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(left_count) +
                                    right_sum * right_sum / static_cast<double>(right_count) -
                                    parent_term;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = j;
                    best_bin = b;
                    found = true;
                }
            }
        }
        if (!found) {
            return id;
        }

        const auto& fbins = bins[best_feature];
        const auto mid = std::stable_partition(
            order.begin() + static_cast<std::ptrdiff_t>(begin),
            order.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t i) { return fbins[i] <= best_bin; });
        const std::size_t split = static_cast<std::size_t>(mid - order.begin());

        tree[static_cast<std::size_t>(id)].feature = static_cast<std::int32_t>(best_feature);
        tree[static_cast<std::size_t>(id)].threshold = thresholds_[best_feature][best_bin];
        const std::int32_t left =
            build_tree(tree, columns, bins, residual, order, begin, split, depth + 1, cfg);
        const std::int32_t right =
            build_tree(tree, columns, bins, residual, order, split, end, depth + 1, cfg);
        tree[static_cast<std::size_t>(id)].left = left;
        tree[static_cast<std::size_t>(id)].right = right;
        return id;
    }

    double eval_tree(const std::vector<Node>& tree,
                     const std::vector<std::vector<double>>& columns, std::size_t i) const {
        std::int32_t at = 0;
        while (tree[static_cast<std::size_t>(at)].feature >= 0) {
            const Node& nd = tree[static_cast<std::size_t>(at)];
            at = columns[static_cast<std::size_t>(nd.feature)][i] <= nd.threshold ? nd.left
                                                                                  : nd.right;
        }
        return tree[static_cast<std::size_t>(at)].value;
    }

    std::size_t m_bins(std::size_t j) const { return thresholds_[j].size() + 1; }

    std::vector<std::vector<Node>> trees_;
    std::vector<std::vector<double>> thresholds_;
    std::vector<double> training_mse_;
    double bias_ = 0.0;
    double learning_rate_ = 0.1;
    std::size_t feature_count_ = 0;
};

} // namespace csl
