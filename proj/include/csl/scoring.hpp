#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "csl/dataset.hpp"
#include "csl/errors.hpp"
#include "csl/gbdt.hpp"
#include "csl/ridge.hpp"

namespace csl {

// The transformed outcome: an unbiased per-unit effect signal under
// randomized treatment with propensity p.
inline double transformed_outcome(double y, bool t, double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw PropensityOutOfRange("propensity " + std::to_string(p));
    }
    return y * ((t ? 1.0 : 0.0) - p) / (p * (1.0 - p));
}

// Difference of arm outcome means within the units selected by the
// feature-row predicate.
inline double difference_in_means_cas(const ExperimentDataset& ds,
                                      const std::function<bool(const std::vector<double>&)>& stratum) {
    double yt = 0.0, yc = 0.0;
    std::size_t nt = 0, nc = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (!stratum(ds.row(i))) {
            continue;
        }
        if (ds.treatment()[i]) {
            yt += ds.outcome()[i];
            ++nt;
        } else {
            yc += ds.outcome()[i];
            ++nc;
        }
    }
    if (nt == 0 || nc == 0) {
        throw EmptyArmInStratum("stratum has " + std::to_string(nt) + " treated and " +
                                std::to_string(nc) + " control units");
    }
    return yt / static_cast<double>(nt) - yc / static_cast<double>(nc);
}

enum class ScoreKind {
    difference_in_means,
    transformed_outcome,
    outcome_rate,
    propensity,
    s_learner,
    t_learner,
};

inline const char* to_string(ScoreKind k) {
    switch (k) {
        case ScoreKind::difference_in_means: return "difference_in_means";
        case ScoreKind::transformed_outcome: return "transformed_outcome";
        case ScoreKind::outcome_rate: return "outcome_rate";
        case ScoreKind::propensity: return "propensity";
        case ScoreKind::s_learner: return "s_learner";
        default: return "t_learner";
    }
}

inline ScoreKind score_kind_from_string(const std::string& s) {
    if (s == "difference_in_means") return ScoreKind::difference_in_means;
    if (s == "transformed_outcome") return ScoreKind::transformed_outcome;
    if (s == "outcome_rate") return ScoreKind::outcome_rate;
    if (s == "propensity") return ScoreKind::propensity;
    if (s == "s_learner") return ScoreKind::s_learner;
    if (s == "t_learner") return ScoreKind::t_learner;
    throw InvalidConfig("unknown score kind '" + s + "'");
}

enum class LearnerKind { ridge_linear, gradient_boosted_trees };
enum class TargetColumn { primary, surrogate };
enum class PropensitySource { constant, fitted };

struct BaseLearnerConfig {
    LearnerKind learner = LearnerKind::gradient_boosted_trees;
    GbdtConfig trees;
    RidgeConfig ridge;
};

// One fitted base learner behind a uniform predict interface.
class FittedLearner {
public:
    static FittedLearner fit(const BaseLearnerConfig& cfg,
                             const std::vector<std::vector<double>>& columns,
                             const std::vector<double>& target) {
        FittedLearner f;
        if (cfg.learner == LearnerKind::ridge_linear) {
            f.model_ = RidgeModel::fit(columns, target, cfg.ridge);
        } else {
            f.model_ = GbdtModel::fit(columns, target, cfg.trees);
        }
        return f;
    }

    std::vector<double> predict(const std::vector<std::vector<double>>& columns) const {
        return std::visit([&](const auto& m) { return m.predict(columns); }, model_);
    }

    std::size_t feature_count() const {
        return std::visit([](const auto& m) { return m.feature_count(); }, model_);
    }

    const GbdtModel* as_gbdt() const { return std::get_if<GbdtModel>(&model_); }
    const RidgeModel* as_ridge() const { return std::get_if<RidgeModel>(&model_); }

private:
    std::variant<RidgeModel, GbdtModel> model_;
};

namespace detail {

inline std::vector<std::vector<double>> feature_columns(const ExperimentDataset& ds) {
    std::vector<std::vector<double>> cols(ds.feature_count());
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        cols[j] = ds.feature(j);
    }
    return cols;
}

inline std::vector<std::vector<double>> select_rows(const std::vector<std::vector<double>>& cols,
                                                    const std::vector<std::size_t>& idx) {
    std::vector<std::vector<double>> out(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out[j].reserve(idx.size());
        for (std::size_t i : idx) {
            out[j].push_back(cols[j][i]);
        }
    }
    return out;
}

inline void require_varying(const std::vector<double>& target, const char* what) {
    const auto [lo, hi] = std::minmax_element(target.begin(), target.end());
    if (*lo == *hi) {
        throw DegenerateTarget(std::string(what) + " is constant at " + std::to_string(*lo));
    }
}

} // namespace detail

// A fitted causal scoring model. predict() is deterministic and returns one
// finite score per row.
class ScoreModel {
public:
    ScoreKind kind() const noexcept { return kind_; }
    TargetColumn target() const noexcept { return target_; }
    PropensitySource propensity_source() const noexcept { return propensity_source_; }
    double propensity_constant() const noexcept { return propensity_constant_; }

    // outcome_rate fallback: true when no untreated rows existed and the
    // rate was fitted on all rows instead.
    bool fitted_on_all_rows() const noexcept { return fitted_on_all_rows_; }

    std::size_t feature_count() const noexcept { return feature_count_; }

    std::vector<double> predict(const std::vector<std::vector<double>>& columns) const {
        if (columns.size() != feature_count_) {
            throw DimensionMismatch("model expects " + std::to_string(feature_count_) +
                                    " feature columns, got " + std::to_string(columns.size()));
        }
        const std::size_t n = columns.empty() ? 0 : columns[0].size();
        switch (kind_) {
            case ScoreKind::difference_in_means:
                return std::vector<double>(n, constant_);
            case ScoreKind::transformed_outcome:
            case ScoreKind::outcome_rate:
            case ScoreKind::propensity:
                return main_->predict(columns);
            case ScoreKind::s_learner: {
                auto augmented = columns;
                augmented.emplace_back(n, 1.0);
                auto treated = main_->predict(augmented);
                augmented.back().assign(n, 0.0);
                const auto control = main_->predict(augmented);
                for (std::size_t i = 0; i < n; ++i) {
                    treated[i] -= control[i];
                }
                return treated;
            }
            case ScoreKind::t_learner:
            default: {
                auto treated = main_->predict(columns);
                const auto control = second_->predict(columns);
                for (std::size_t i = 0; i < n; ++i) {
                    treated[i] -= control[i];
                }
                return treated;
            }
        }
    }

    std::vector<double> predict(const ExperimentDataset& ds) const {
        return predict(detail::feature_columns(ds));
    }

    friend ScoreModel fit(ScoreKind, const ExperimentDataset&, const BaseLearnerConfig&,
                          TargetColumn, PropensitySource);

private:
    ScoreKind kind_ = ScoreKind::difference_in_means;
    TargetColumn target_ = TargetColumn::primary;
    PropensitySource propensity_source_ = PropensitySource::constant;
    double propensity_constant_ = 0.5;
    double constant_ = 0.0;
    bool fitted_on_all_rows_ = false;
    std::size_t feature_count_ = 0;
    std::optional<FittedLearner> main_;   // treated-arm model for t_learner
    std::optional<FittedLearner> second_; // control-arm model for t_learner
};

inline ScoreModel fit(ScoreKind kind, const ExperimentDataset& ds,
                      const BaseLearnerConfig& base, TargetColumn target = TargetColumn::primary,
                      PropensitySource propensity = PropensitySource::constant) {
    if (ds.n() == 0) {
        throw TooFewUnits("fit needs a nonempty dataset");
    }
    const std::vector<double>& outcome =
        target == TargetColumn::surrogate ? ds.surrogate() : ds.outcome();

    ScoreModel m;
    m.kind_ = kind;
    m.target_ = target;
    m.propensity_source_ = propensity;
    m.feature_count_ = ds.feature_count();

    std::vector<std::size_t> treated_idx, control_idx;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        (ds.treatment()[i] ? treated_idx : control_idx).push_back(i);
    }
    const auto cols = detail::feature_columns(ds);

    switch (kind) {
        case ScoreKind::difference_in_means: {
            if (treated_idx.empty() || control_idx.empty()) {
                throw MissingArm("difference_in_means needs both arms");
            }
            double yt = 0.0, yc = 0.0;
            for (std::size_t i : treated_idx) {
                yt += outcome[i];
            }
            for (std::size_t i : control_idx) {
                yc += outcome[i];
            }
            m.constant_ = yt / static_cast<double>(treated_idx.size()) -
                          yc / static_cast<double>(control_idx.size());
            break;
        }
        case ScoreKind::transformed_outcome: {
            if (treated_idx.empty() || control_idx.empty()) {
                throw MissingArm("transformed_outcome needs both arms");
            }
            std::vector<double> p(ds.n());
            if (propensity == PropensitySource::constant) {
                m.propensity_constant_ = static_cast<double>(treated_idx.size()) /
                                         static_cast<double>(ds.n());
                std::fill(p.begin(), p.end(), m.propensity_constant_);
            } else {
                std::vector<double> t(ds.n());
                for (std::size_t i = 0; i < ds.n(); ++i) {
                    t[i] = ds.treatment()[i] ? 1.0 : 0.0;
                }
                const auto prop_model = FittedLearner::fit(base, cols, t);
                p = prop_model.predict(cols);
                // Fitted propensities are clamped away from the boundary so
                // the transform stays finite.
                for (double& v : p) {
                    v = std::clamp(v, 1e-6, 1.0 - 1e-6);
                }
            }
            std::vector<double> s(ds.n());
            for (std::size_t i = 0; i < ds.n(); ++i) {
                s[i] = transformed_outcome(outcome[i], ds.treatment()[i] != 0, p[i]);
            }
            detail::require_varying(s, "transformed outcome");
            m.main_ = FittedLearner::fit(base, cols, s);
            break;
        }
        case ScoreKind::outcome_rate: {
            std::vector<double> y;
            std::vector<std::vector<double>> rows;
            if (control_idx.empty()) {
                m.fitted_on_all_rows_ = true;
                rows = cols;
                y = outcome;
            } else {
                rows = detail::select_rows(cols, control_idx);
                y.reserve(control_idx.size());
                for (std::size_t i : control_idx) {
                    y.push_back(outcome[i]);
                }
            }
            detail::require_varying(y, "outcome rate target");
            m.main_ = FittedLearner::fit(base, rows, y);
            break;
        }
        case ScoreKind::propensity: {
            std::vector<double> t(ds.n());
            for (std::size_t i = 0; i < ds.n(); ++i) {
                t[i] = ds.treatment()[i] ? 1.0 : 0.0;
            }
            detail::require_varying(t, "treatment indicator");
            m.main_ = FittedLearner::fit(base, cols, t);
            break;
        }
        case ScoreKind::s_learner: {
            detail::require_varying(outcome, "outcome");
            auto augmented = cols;
            augmented.emplace_back(ds.n());
            for (std::size_t i = 0; i < ds.n(); ++i) {
                augmented.back()[i] = ds.treatment()[i] ? 1.0 : 0.0;
            }
            m.main_ = FittedLearner::fit(base, augmented, outcome);
            break;
        }
        case ScoreKind::t_learner:
        default: {
            if (treated_idx.empty() || control_idx.empty()) {
                throw MissingArm("t_learner needs both arms");
            }
            std::vector<double> yt, yc;
            yt.reserve(treated_idx.size());
            yc.reserve(control_idx.size());
            for (std::size_t i : treated_idx) {
                yt.push_back(outcome[i]);
            }
            for (std::size_t i : control_idx) {
                yc.push_back(outcome[i]);
            }
            detail::require_varying(outcome, "outcome");
            m.main_ = FittedLearner::fit(base, detail::select_rows(cols, treated_idx), yt);
            m.second_ = FittedLearner::fit(base, detail::select_rows(cols, control_idx), yc);
            break;
        }
    }
    return m;
}

} // namespace csl
