#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "csl/dataset.hpp"
#include "csl/errors.hpp"
#include "csl/interpret.hpp"
#include "csl/normal.hpp"

namespace csl {

namespace detail {

// Ranking permutation: descending score, original index breaking ties.
inline std::vector<std::size_t> rank_order(const std::vector<double>& scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

inline std::size_t top_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(n) + 0.5));
}

} // namespace detail

// Rank agreement between an estimate and the true-effect order. The input is
// the estimates arranged by strictly descending true effect; concordant minus
// discordant pairs over all pairs, so exact ties in the estimate pull the
// statistic toward zero.
inline double kendall_tau(const std::vector<double>& theta_hat) {
    const std::size_t n = theta_hat.size();
    if (n < 2) {
        throw TooFewUnits("kendall_tau needs at least 2 units");
    }
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t concordant = detail::count_inversions(theta_hat);
    const std::uint64_t ties = detail::tied_pairs(theta_hat);
    const std::uint64_t discordant = total - concordant - ties;
    return (static_cast<double>(concordant) - static_cast<double>(discordant)) /
           static_cast<double>(total);
}

// Quadratic reference implementation.
inline double kendall_tau_brute(const std::vector<double>& theta_hat) {
    const std::size_t n = theta_hat.size();
    if (n < 2) {
        throw TooFewUnits("kendall_tau needs at least 2 units");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (theta_hat[i] > theta_hat[j]) {
                s += 1.0;
            } else if (theta_hat[i] < theta_hat[j]) {
                s -= 1.0;
            }
        }
    }
    return s / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

// Convenience wrapper when the estimates are not yet arranged: sorts units by
// descending true effect (stable) and scores the estimates in that order.
inline double kendall_tau_against(const std::vector<double>& estimates,
                                  const std::vector<double>& true_effects) {
    if (estimates.size() != true_effects.size()) {
        throw LengthMismatch("estimates vs true effects");
    }
    const std::size_t n = estimates.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return true_effects[a] > true_effects[b];
    });
    std::vector<double> arranged(n);
    for (std::size_t i = 0; i < n; ++i) {
        arranged[i] = estimates[idx[i]];
    }
    return kendall_tau(arranged);
}

// Pairwise Gaussian model for the expected rank agreement of a noisy scorer:
// for each pair (ordered by descending true effect) the estimate gap is
// beta_delta + alpha_delta + noise with noise ~ N(0, xi_delta_sd^2).
struct RankNoiseModel {
    std::vector<double> beta_deltas;   // strictly positive true-effect gaps
    std::vector<double> alpha_deltas;  // systematic score-bias gaps, aligned
    double xi_delta_sd = 1.0;

    // Builds every pairwise gap from per-unit values. betas must be strictly
    // descending; independent per-unit noise with sd unit_noise_sd gives
    // pairwise noise sd sqrt(2) * unit_noise_sd.
    static RankNoiseModel from_units(const std::vector<double>& betas_descending,
                                     const std::vector<double>& alphas,
                                     double unit_noise_sd) {
        const std::size_t n = betas_descending.size();
        if (alphas.size() != n) {
            throw LengthMismatch("betas vs alphas");
        }
        if (n < 2) {
            throw TooFewUnits("rank noise model needs at least 2 units");
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (!(betas_descending[i - 1] > betas_descending[i])) {
                throw InvalidConfig("unit effects must be strictly descending");
            }
        }
        if (!(unit_noise_sd >= 0.0)) {
            throw InvalidConfig("unit noise sd must be nonnegative");
        }
        RankNoiseModel m;
        m.xi_delta_sd = std::sqrt(2.0) * unit_noise_sd;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                m.beta_deltas.push_back(betas_descending[i] - betas_descending[j]);
                m.alpha_deltas.push_back(alphas[i] - alphas[j]);
            }
        }
        return m;
    }
};

// Expected Kendall rank agreement under the pairwise Gaussian model:
// average over pairs of 2 * P[gap estimated with the right sign] - 1. With
// zero noise the probability degenerates to an indicator (one half when the
// systematic gap exactly cancels the true gap).
inline double expected_tau(const RankNoiseModel& m) {
    const std::size_t pairs = m.beta_deltas.size();
    if (pairs == 0) {
        throw TooFewUnits("rank noise model has no pairs");
    }
    if (m.alpha_deltas.size() != pairs) {
        throw LengthMismatch("beta_deltas vs alpha_deltas");
    }
    if (!(m.xi_delta_sd >= 0.0)) {
        throw InvalidConfig("pairwise noise sd must be nonnegative");
    }
    double sum = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
        if (!(m.beta_deltas[p] > 0.0)) {
            throw InvalidConfig("beta_deltas must be strictly positive");
        }
        const double shift = m.beta_deltas[p] + m.alpha_deltas[p];
        double prob;
        if (m.xi_delta_sd > 0.0) {
            prob = norm_cdf(shift / m.xi_delta_sd);
        } else {
            prob = shift > 0.0 ? 1.0 : (shift < 0.0 ? 0.0 : 0.5);
        }
        sum += prob;
    }
    return 2.0 * sum / static_cast<double>(pairs) - 1.0;
}

// ---- Targeting curves ----

enum class CurveKind { qini, profit };

struct UpliftCurve {
    CurveKind kind = CurveKind::qini;
    std::vector<double> fractions; // ascending, fractions.front() == 0
    std::vector<double> values;    // values.front() == 0
};

enum class QiniScaling {
    total_arm,  // cumulative arm outcomes over full arm sizes
    within_top, // difference in means inside the targeted slice
};

inline UpliftCurve qini_curve(const ExperimentDataset& ds, const std::vector<double>& scores,
                              std::size_t grid_points = 100,
                              QiniScaling scaling = QiniScaling::total_arm) {
    const std::size_t n = ds.n();
    if (scores.size() != n) {
        throw LengthMismatch("scores vs dataset");
    }
    if (n == 0) {
        throw TooFewUnits("qini_curve needs a nonempty dataset");
    }
    if (grid_points < 2) {
        throw InvalidConfig("qini_curve needs at least 2 grid points");
    }
    std::size_t n_treated = 0;
    for (std::uint8_t t : ds.treatment()) {
        n_treated += t;
    }
    const std::size_t n_control = n - n_treated;
    if (n_treated == 0 || n_control == 0) {
        throw MissingArm("qini_curve needs both arms");
    }

    const auto order = detail::rank_order(scores);
    std::vector<double> cum_yt(n + 1, 0.0), cum_yc(n + 1, 0.0);
    std::vector<std::size_t> cum_nt(n + 1, 0), cum_nc(n + 1, 0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = order[r];
        const bool treated = ds.treatment()[i] != 0;
        cum_yt[r + 1] = cum_yt[r] + (treated ? ds.outcome()[i] : 0.0);
        cum_yc[r + 1] = cum_yc[r] + (treated ? 0.0 : ds.outcome()[i]);
        cum_nt[r + 1] = cum_nt[r] + (treated ? 1 : 0);
        cum_nc[r + 1] = cum_nc[r] + (treated ? 0 : 1);
    }

    UpliftCurve curve;
    curve.kind = CurveKind::qini;
    curve.fractions.resize(grid_points);
    curve.values.resize(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double f = static_cast<double>(g) / static_cast<double>(grid_points - 1);
        const std::size_t k = detail::top_count(f, n);
        curve.fractions[g] = f;
        if (scaling == QiniScaling::total_arm) {
            curve.values[g] = cum_yt[k] / static_cast<double>(n_treated) -
                              cum_yc[k] / static_cast<double>(n_control);
        } else {
            if (k == 0 || cum_nt[k] == 0 || cum_nc[k] == 0) {
                curve.values[g] = 0.0;
            } else {
                curve.values[g] = cum_yt[k] / static_cast<double>(cum_nt[k]) -
                                  cum_yc[k] / static_cast<double>(cum_nc[k]);
            }
        }
    }
    return curve;
}

namespace detail {

inline double trapezoid_area(const UpliftCurve& c) {
    double area = 0.0;
    for (std::size_t g = 1; g < c.fractions.size(); ++g) {
        area += 0.5 * (c.values[g] + c.values[g - 1]) *
                (c.fractions[g] - c.fractions[g - 1]);
    }
    return area;
}

} // namespace detail

// Area under the curve relative to the area under an optimal reference
// ranking on the same grid. Negative ratios are reported as-is: a ranking
// that is worse than random shows up below zero.
inline double auqc(const UpliftCurve& curve, const UpliftCurve& optimal_reference) {
    if (curve.fractions.size() != optimal_reference.fractions.size() ||
        curve.values.size() != curve.fractions.size() ||
        optimal_reference.values.size() != optimal_reference.fractions.size()) {
        throw GridMismatch("curve grids differ in size");
    }
    for (std::size_t g = 0; g < curve.fractions.size(); ++g) {
        if (std::abs(curve.fractions[g] - optimal_reference.fractions[g]) > 1e-12) {
            throw GridMismatch("curve grids differ at a fraction");
        }
    }
    if (curve.fractions.size() < 2) {
        throw GridMismatch("curves need at least 2 grid points");
    }
    const double ref = detail::trapezoid_area(optimal_reference);
    if (ref == 0.0) {
        throw InvalidConfig("optimal reference curve has zero area");
    }
    return detail::trapezoid_area(curve) / ref;
}

// Difference in mean outcomes between arms inside the top scored fraction.
inline double top_k_uplift(const ExperimentDataset& ds, const std::vector<double>& scores,
                           double fraction) {
    const std::size_t n = ds.n();
    if (scores.size() != n) {
        throw LengthMismatch("scores vs dataset");
    }
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw InvalidConfig("fraction must lie in (0, 1]");
    }
    const std::size_t k = detail::top_count(fraction, n);
    if (k == 0) {
        throw EmptySelection("top fraction selects no units");
    }
    const auto order = detail::rank_order(scores);
    double yt = 0.0, yc = 0.0;
    std::size_t nt = 0, nc = 0;
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = order[r];
        if (ds.treatment()[i]) {
            yt += ds.outcome()[i];
            ++nt;
        } else {
            yc += ds.outcome()[i];
            ++nc;
        }
    }
    if (nt == 0 || nc == 0) {
        throw MissingArm("top slice lacks one arm");
    }
    return yt / static_cast<double>(nt) - yc / static_cast<double>(nc);
}

// Expected incremental profit of treating the top fraction of a population
// of n_population units, priced by the within-slice arm contrast. Slices
// where one arm is empty contribute zero (no estimable contrast).
inline UpliftCurve profit_curve(const ExperimentDataset& ds, const std::vector<double>& scores,
                                double n_population, std::size_t grid_points = 100) {
    const std::size_t n = ds.n();
    if (scores.size() != n) {
        throw LengthMismatch("scores vs dataset");
    }
    if (n == 0) {
        throw TooFewUnits("profit_curve needs a nonempty dataset");
    }
    if (!(n_population > 0.0)) {
        throw InvalidConfig("n_population must be positive");
    }
    if (grid_points < 2) {
        throw InvalidConfig("profit_curve needs at least 2 grid points");
    }
    const auto order = detail::rank_order(scores);
    std::vector<double> cum_yt(n + 1, 0.0), cum_yc(n + 1, 0.0);
    std::vector<std::size_t> cum_nt(n + 1, 0), cum_nc(n + 1, 0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = order[r];
        const bool treated = ds.treatment()[i] != 0;
        cum_yt[r + 1] = cum_yt[r] + (treated ? ds.outcome()[i] : 0.0);
        cum_yc[r + 1] = cum_yc[r] + (treated ? 0.0 : ds.outcome()[i]);
        cum_nt[r + 1] = cum_nt[r] + (treated ? 1 : 0);
        cum_nc[r + 1] = cum_nc[r] + (treated ? 0 : 1);
    }
    UpliftCurve curve;
    curve.kind = CurveKind::profit;
    curve.fractions.resize(grid_points);
    curve.values.resize(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double f = static_cast<double>(g) / static_cast<double>(grid_points - 1);
        const std::size_t k = detail::top_count(f, n);
        curve.fractions[g] = f;
        if (k == 0 || cum_nt[k] == 0 || cum_nc[k] == 0) {
            curve.values[g] = 0.0;
        } else {
            const double contrast = cum_yt[k] / static_cast<double>(cum_nt[k]) -
                                    cum_yc[k] / static_cast<double>(cum_nc[k]);
            curve.values[g] =
                n_population * (static_cast<double>(k) / static_cast<double>(n)) * contrast;
        }
    }
    return curve;
}

struct BestOperatingPoint {
    double fraction = 0.0;
    double value = 0.0;
};

// First maximizer along the curve.
inline BestOperatingPoint best_operating_point(const UpliftCurve& curve) {
    if (curve.values.empty() || curve.values.size() != curve.fractions.size()) {
        throw GridMismatch("curve is empty or misaligned");
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < curve.values.size(); ++g) {
        if (curve.values[g] > curve.values[best]) {
            best = g;
        }
    }
    return {curve.fractions[best], curve.values[best]};
}

// ---- Score-vs-effect calibration by quintile ----

struct QuintileSummary {
    std::array<double, 5> mean_score{};
    std::array<double, 5> mean_effect{};
    std::array<double, 5> bias{}; // mean_score - mean_effect
};

// Splits units into positional fifths by ascending score (stable on the
// original index, so constant scores degrade to index blocks) and compares
// the average score against the average effect in each fifth. Effects come
// from the supplied per-unit values when present, otherwise from the arm
// contrast within the fifth.
inline QuintileSummary quintile_bias(
    const ExperimentDataset& ds, const std::vector<double>& scores,
    const std::optional<std::vector<double>>& unit_effects = std::nullopt) {
    const std::size_t n = ds.n();
    if (scores.size() != n) {
        throw LengthMismatch("scores vs dataset");
    }
    if (unit_effects && unit_effects->size() != n) {
        throw LengthMismatch("unit effects vs dataset");
    }
    if (n < 5) {
        throw TooFewUnits("quintile_bias needs at least 5 units");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    QuintileSummary out;
    for (std::size_t q = 0; q < 5; ++q) {
        const std::size_t lo = q * n / 5;
        const std::size_t hi = (q + 1) * n / 5;
        double score_sum = 0.0;
        for (std::size_t r = lo; r < hi; ++r) {
            score_sum += scores[idx[r]];
        }
        const double m = static_cast<double>(hi - lo);
        out.mean_score[q] = score_sum / m;
        if (unit_effects) {
            double e = 0.0;
            for (std::size_t r = lo; r < hi; ++r) {
                e += (*unit_effects)[idx[r]];
            }
            out.mean_effect[q] = e / m;
        } else {
            double yt = 0.0, yc = 0.0;
            std::size_t nt = 0, nc = 0;
            for (std::size_t r = lo; r < hi; ++r) {
                const std::size_t i = idx[r];
                if (ds.treatment()[i]) {
                    yt += ds.outcome()[i];
                    ++nt;
                } else {
                    yc += ds.outcome()[i];
                    ++nc;
                }
            }
            if (nt == 0 || nc == 0) {
                throw MissingArm("quintile " + std::to_string(q + 1) + " lacks one arm");
            }
            out.mean_effect[q] = yt / static_cast<double>(nt) - yc / static_cast<double>(nc);
        }
        out.bias[q] = out.mean_score[q] - out.mean_effect[q];
    }
    return out;
}

} // namespace csl
