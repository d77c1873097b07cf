#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csl/errors.hpp"

namespace csl {

// Immutable experiment table: feature columns, a binary treatment arm
// indicator, a primary outcome, and an optional surrogate outcome. Features
// are stored column-major so learners can scan one feature contiguously.
class ExperimentDataset {
public:
    ExperimentDataset(std::vector<std::vector<double>> feature_columns,
                      std::vector<std::uint8_t> treatment,
                      std::vector<double> outcome,
                      std::optional<std::vector<double>> surrogate = std::nullopt,
                      std::vector<std::string> feature_names = {})
        : columns_(std::move(feature_columns)),
          treatment_(std::move(treatment)),
          outcome_(std::move(outcome)),
          surrogate_(std::move(surrogate)),
          names_(std::move(feature_names)) {
        const std::size_t n = treatment_.size();
        if (outcome_.size() != n) {
            throw LengthMismatch("outcome length " + std::to_string(outcome_.size()) +
                                 " vs treatment length " + std::to_string(n));
        }
        for (const auto& col : columns_) {
            if (col.size() != n) {
                throw LengthMismatch("feature column length " + std::to_string(col.size()) +
                                     " vs treatment length " + std::to_string(n));
            }
        }
        if (surrogate_ && surrogate_->size() != n) {
            throw LengthMismatch("surrogate length " + std::to_string(surrogate_->size()) +
                                 " vs treatment length " + std::to_string(n));
        }
        for (std::uint8_t t : treatment_) {
            if (t > 1) {
                throw NonBinaryTreatment("treatment value " + std::to_string(int(t)));
            }
        }
        if (names_.empty()) {
            names_.reserve(columns_.size());
            for (std::size_t j = 0; j < columns_.size(); ++j) {
                names_.push_back("f" + std::to_string(j));
            }
        } else if (names_.size() != columns_.size()) {
            throw LengthMismatch("feature name count vs feature column count");
        }
    }

    std::size_t n() const noexcept { return treatment_.size(); }
    std::size_t feature_count() const noexcept { return columns_.size(); }

    const std::vector<double>& feature(std::size_t j) const { return columns_.at(j); }
    double feature_at(std::size_t i, std::size_t j) const { return columns_[j][i]; }

    std::vector<double> row(std::size_t i) const {
        std::vector<double> r(columns_.size());
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            r[j] = columns_[j][i];
        }
        return r;
    }

    const std::vector<std::uint8_t>& treatment() const noexcept { return treatment_; }
    const std::vector<double>& outcome() const noexcept { return outcome_; }

    bool has_surrogate() const noexcept { return surrogate_.has_value(); }
    const std::vector<double>& surrogate() const {
        if (!surrogate_) {
            throw MissingSurrogate("dataset has no surrogate outcome column");
        }
        return *surrogate_;
    }

    const std::vector<std::string>& feature_names() const noexcept { return names_; }

private:
    std::vector<std::vector<double>> columns_;
    std::vector<std::uint8_t> treatment_;
    std::vector<double> outcome_;
    std::optional<std::vector<double>> surrogate_;
    std::vector<std::string> names_;
};

// Builds a dataset from a numeric treatment column, rejecting any value
// that is not exactly 0 or 1.
inline ExperimentDataset make_dataset(std::vector<std::vector<double>> feature_columns,
                                      const std::vector<double>& treatment,
                                      std::vector<double> outcome,
                                      std::optional<std::vector<double>> surrogate = std::nullopt,
                                      std::vector<std::string> feature_names = {}) {
    std::vector<std::uint8_t> t(treatment.size());
    for (std::size_t i = 0; i < treatment.size(); ++i) {
        if (treatment[i] == 0.0) {
            t[i] = 0;
        } else if (treatment[i] == 1.0) {
            t[i] = 1;
        } else {
            throw NonBinaryTreatment("treatment value " + std::to_string(treatment[i]) +
                                     " at index " + std::to_string(i));
        }
    }
    return ExperimentDataset(std::move(feature_columns), std::move(t), std::move(outcome),
                             std::move(surrogate), std::move(feature_names));
}

// Ground truth attached to a simulated dataset, aligned by unit index.
struct OracleTruth {
    std::vector<double> cate;        // E[Y1 - Y0 | X = x_i]
    std::vector<double> cas;         // E[score target | X = x_i]
    std::vector<double> latent_mean; // latent driver mu(x_i) (or psi(x_i))
    std::vector<double> y0;          // drawn potential outcome under control
    std::vector<double> y1;          // drawn potential outcome under treatment

    void validate(std::size_t n) const {
        auto check = [n](const std::vector<double>& v, const char* name) {
            if (!v.empty() && v.size() != n) {
                throw LengthMismatch(std::string(name) + " length vs dataset n");
            }
        };
        check(cate, "cate");
        check(cas, "cas");
        check(latent_mean, "latent_mean");
        check(y0, "y0");
        check(y1, "y1");
    }
};

struct SimulatedExperiment {
    ExperimentDataset dataset;
    OracleTruth oracle;
};

// Targeting rule: treat when the score clears the score threshold
// (strictly). effect_threshold records the effect-scale cutoff the rule is
// meant to reproduce.
struct PolicySpec {
    double effect_threshold = 0.0;
    double score_threshold = 0.0;

    bool treat(double score) const noexcept { return score > score_threshold; }
};

struct DatasetSummary {
    std::size_t n = 0;
    std::size_t feature_count = 0;
    double treatment_rate = 0.0;
    double outcome_mean = 0.0;
    double treated_outcome_mean = 0.0;
    double control_outcome_mean = 0.0;
    std::optional<double> surrogate_mean;
};

inline DatasetSummary summarize(const ExperimentDataset& ds) {
    DatasetSummary s;
    s.n = ds.n();
    s.feature_count = ds.feature_count();
    if (s.n == 0) {
        return s;
    }
    double treated = 0.0, y_sum = 0.0, yt_sum = 0.0, yc_sum = 0.0;
    std::size_t nt = 0;
    for (std::size_t i = 0; i < s.n; ++i) {
        const double y = ds.outcome()[i];
        y_sum += y;
        if (ds.treatment()[i]) {
            ++nt;
            yt_sum += y;
        } else {
            yc_sum += y;
        }
    }
    treated = static_cast<double>(nt);
    s.treatment_rate = treated / static_cast<double>(s.n);
    s.outcome_mean = y_sum / static_cast<double>(s.n);
    s.treated_outcome_mean = nt ? yt_sum / treated : 0.0;
    s.control_outcome_mean = (s.n - nt) ? yc_sum / static_cast<double>(s.n - nt) : 0.0;
    if (ds.has_surrogate()) {
        double sum = 0.0;
        for (double v : ds.surrogate()) {
            sum += v;
        }
        s.surrogate_mean = sum / static_cast<double>(s.n);
    }
    return s;
}

} // namespace csl
