#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "csl/errors.hpp"
#include "csl/normal.hpp"

namespace csl {

enum class Interpretation { ee, eo, ec };

inline const char* to_string(Interpretation k) {
    switch (k) {
        case Interpretation::ee: return "EE";
        case Interpretation::eo: return "EO";
        default: return "EC";
    }
}

// Score thresholds reproducing an effect cutoff. Stored per the (low, high]
// convention: low = max score over low-effect units, high = min score over
// high-effect units; a side without units is +-infinity. Under the strict
// score > tau~ decision rule every tau~ in [low, high) reproduces the
// classification, so the interval is nonempty exactly when low < high.
struct ThresholdInterval {
    double low = -std::numeric_limits<double>::infinity();
    double high = std::numeric_limits<double>::infinity();
};

struct InterpretationVerdict {
    Interpretation kind = Interpretation::eo;
    bool valid = false;
    // EO: number of discordant pairs. EC: minimum number of units any single
    // strict threshold misclassifies (0 exactly when a valid threshold exists).
    std::uint64_t violations = 0;
    // EO only: pairs tied on scores or on effects; never counted against validity.
    std::uint64_t ties = 0;
    std::optional<ThresholdInterval> threshold_interval;
};

namespace detail {

// Counts strict inversions (pairs i < j with a[i] > a[j]) by merge sort.
inline std::uint64_t merge_count(std::vector<double>& a, std::vector<double>& buf,
                                 std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            inv += mid - i;
            buf[k++] = a[j++];
        } else {
            buf[k++] = a[i++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
              buf.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

inline std::uint64_t count_inversions(std::vector<double> a) {
    std::vector<double> buf(a.size());
    return merge_count(a, buf, 0, a.size());
}

// Sum over equal-value groups of C(group, 2).
inline std::uint64_t tied_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        const std::uint64_t g = j - i;
        total += g * (g - 1) / 2;
        i = j;
    }
    return total;
}

inline std::uint64_t tied_pairs_joint(std::vector<std::pair<double, double>> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        const std::uint64_t g = j - i;
        total += g * (g - 1) / 2;
        i = j;
    }
    return total;
}

} // namespace detail

struct EoPairCounts {
    std::uint64_t discordant = 0;
    std::uint64_t ties = 0;
};

// Reference O(n^2) pair scan; kept public as the oracle for the fast path.
inline EoPairCounts eo_pair_counts_brute(const std::vector<double>& theta,
                                         const std::vector<double>& beta) {
    if (theta.size() != beta.size()) {
        throw LengthMismatch("theta vs beta length");
    }
    EoPairCounts c;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        for (std::size_t j = i + 1; j < theta.size(); ++j) {
            const double dt = theta[i] - theta[j];
            const double db = beta[i] - beta[j];
            if (dt == 0.0 || db == 0.0) {
                ++c.ties;
            } else if ((dt > 0.0) != (db > 0.0)) {
                ++c.discordant;
            }
        }
    }
    return c;
}

// O(n log n) pair counts: order by (beta asc, theta asc) and count strict
// theta inversions; within an equal-beta block theta is ascending, so block
// pairs never count as inversions and land in the tie tally instead.
inline EoPairCounts eo_pair_counts_fast(const std::vector<double>& theta,
                                        const std::vector<double>& beta) {
    if (theta.size() != beta.size()) {
        throw LengthMismatch("theta vs beta length");
    }
    const std::size_t n = theta.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (beta[a] != beta[b]) return beta[a] < beta[b];
        return theta[a] < theta[b];
    });
    std::vector<double> th(n);
    for (std::size_t i = 0; i < n; ++i) {
        th[i] = theta[idx[i]];
    }
    EoPairCounts c;
    c.discordant = detail::count_inversions(std::move(th));
    std::vector<std::pair<double, double>> joint(n);
    for (std::size_t i = 0; i < n; ++i) {
        joint[i] = {beta[i], theta[i]};
    }
    c.ties = detail::tied_pairs(beta) + detail::tied_pairs(theta) -
             detail::tied_pairs_joint(std::move(joint));
    return c;
}

// Effect ordering: valid when no pair of units is ranked strictly opposite
// by scores and effects. Tied pairs are reported but never violate.
inline InterpretationVerdict check_eo(const std::vector<double>& theta,
                                      const std::vector<double>& beta) {
    if (theta.size() != beta.size()) {
        throw LengthMismatch("theta vs beta length");
    }
    if (theta.size() < 2) {
        throw TooFewUnits("check_eo needs at least 2 units");
    }
    const EoPairCounts c = eo_pair_counts_fast(theta, beta);
    InterpretationVerdict v;
    v.kind = Interpretation::eo;
    v.violations = c.discordant;
    v.ties = c.ties;
    v.valid = (c.discordant == 0);
    return v;
}

// Effect classification at effect cutoff tau: valid when the units with
// beta > tau are exactly the units above some strict score threshold.
// violations reports the best achievable misclassification count.
inline InterpretationVerdict check_ec(const std::vector<double>& theta,
                                      const std::vector<double>& beta, double tau) {
    if (theta.size() != beta.size()) {
        throw LengthMismatch("theta vs beta length");
    }
    const std::size_t n = theta.size();
    InterpretationVerdict v;
    v.kind = Interpretation::ec;

    ThresholdInterval interval;
    std::uint64_t high_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] > tau) {
            interval.high = std::min(interval.high, theta[i]);
            ++high_count;
        } else {
            interval.low = std::max(interval.low, theta[i]);
        }
    }
    v.valid = interval.low < interval.high;
    if (v.valid) {
        v.threshold_interval = interval;
        v.violations = 0;
        return v;
    }

    // Sweep thresholds from +inf downwards; units sharing a score enter the
    // selected set together. Misclassification = missed high + selected low.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return theta[a] > theta[b]; });
    std::uint64_t err = high_count;
    std::uint64_t best = err;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && theta[idx[j]] == theta[idx[i]]) {
            if (beta[idx[j]] > tau) {
                --err;
            } else {
                ++err;
            }
            ++j;
        }
        best = std::min(best, err);
        i = j;
    }
    v.violations = best;
    return v;
}

struct SynchronyReport {
    std::vector<double> ratios; // h_delta / g_delta per pair with g_delta != 0
    double min_ratio = std::numeric_limits<double>::quiet_NaN();
    double fraction_positive = 0.0;
    double fraction_above_one = 0.0;
    std::uint64_t pair_count = 0;
    std::uint64_t zero_denominator_pairs = 0;

    bool synchrony() const noexcept { return pair_count > 0 && fraction_positive == 1.0; }
    bool bias_helps() const noexcept { return pair_count > 0 && fraction_above_one == 1.0; }
};

// All-pairs ratio check of h_delta / g_delta. Pairs with g_delta = 0 cannot
// be oriented and are counted separately rather than throwing; the ratio is
// orientation-invariant for the rest.
inline SynchronyReport check_synchrony(const std::vector<double>& g_values,
                                       const std::vector<double>& h_values) {
    if (g_values.size() != h_values.size()) {
        throw LengthMismatch("g_values vs h_values length");
    }
    const std::size_t n = g_values.size();
    if (n < 2) {
        throw TooFewUnits("check_synchrony needs at least 2 units");
    }
    SynchronyReport r;
    r.ratios.reserve(n * (n - 1) / 2);
    std::uint64_t positive = 0, above_one = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gd = g_values[i] - g_values[j];
            if (gd == 0.0) {
                ++r.zero_denominator_pairs;
                continue;
            }
            const double ratio = (h_values[i] - h_values[j]) / gd;
            r.ratios.push_back(ratio);
            min_ratio = std::min(min_ratio, ratio);
            if (ratio > 0.0) ++positive;
            if (ratio > 1.0) ++above_one;
        }
    }
    r.pair_count = r.ratios.size();
    if (r.pair_count > 0) {
        r.min_ratio = min_ratio;
        r.fraction_positive = static_cast<double>(positive) / static_cast<double>(r.pair_count);
        r.fraction_above_one = static_cast<double>(above_one) / static_cast<double>(r.pair_count);
    }
    return r;
}

// E[Z | Z > a] for standard normal Z (inverse Mills ratio). The direct
// pdf/sf quotient is accurate until the survival function underflows; past
// that the classic tail expansion takes over.
inline double trunc_norm_mean_above(double a) {
    if (a > 34.0) {
        const double inv = 1.0 / a;
        const double inv2 = inv * inv;
        return a + inv * (1.0 + inv2 * (-2.0 + 10.0 * inv2));
    }
    return norm_pdf(a) / norm_sf(a);
}

inline double trunc_norm_mean_below(double a) {
    return -trunc_norm_mean_above(-a);
}

// Var[Z | Z > a] = 1 - lambda (lambda - a), lambda = E[Z | Z > a].
inline double trunc_norm_var_above(double a) {
    if (a > 34.0) {
        const double inv2 = 1.0 / (a * a);
        return inv2 * (1.0 - 6.0 * inv2);
    }
    const double lam = trunc_norm_mean_above(a);
    return 1.0 - lam * (lam - a);
}

// Baseline selection bias of the score target at latent index psi:
// alpha_y (E[e_u | e_u > -psi] - E[e_u | e_u <= -psi]).
inline double baseline_bias(double psi, double alpha_y) {
    return alpha_y * (trunc_norm_mean_above(-psi) - trunc_norm_mean_below(-psi));
}

// Treated-arm conditional effect at latent index psi:
// beta_val + alpha_c E[e_u | e_u > -psi].
inline double catt(double psi, double beta_val, double alpha_c) {
    return beta_val + alpha_c * trunc_norm_mean_above(-psi);
}

// Every psi must agree in sign with alpha_y (strictly).
inline bool check_assumption3(const std::vector<double>& psi_values, double alpha_y) {
    for (double psi : psi_values) {
        if (!(psi * alpha_y > 0.0)) {
            return false;
        }
    }
    return true;
}

// dbeta/dpsi >= alpha_c (1 - p_tilde) at every grid point, with
// p_tilde = Var[e_u | treated] in (0, 1).
inline bool check_assumption4(const std::vector<double>& dbeta_dpsi, double alpha_c,
                              const std::vector<double>& p_tilde) {
    if (dbeta_dpsi.size() != p_tilde.size()) {
        throw MisalignedInputs("dbeta_dpsi vs p_tilde length");
    }
    for (double p : p_tilde) {
        if (!(p > 0.0 && p < 1.0)) {
            throw MisalignedInputs("p_tilde outside (0, 1)");
        }
    }
    for (std::size_t i = 0; i < p_tilde.size(); ++i) {
        if (dbeta_dpsi[i] < alpha_c * (1.0 - p_tilde[i])) {
            return false;
        }
    }
    return true;
}

// Closed-form decomposition of the selection-confounded score target along a
// psi grid. Only the monotonicity of the sum is needed for a valid ordering;
// the components are reported alongside so a failing piece can be spotted.
struct ThetaProfile {
    std::vector<double> psi;
    std::vector<double> catt_values;
    std::vector<double> bias_values;
    std::vector<double> theta_values;
    bool catt_nondecreasing = false;
    bool bias_nondecreasing = false;
    bool theta_nondecreasing = false;
};

inline ThetaProfile theta_profile(const std::vector<double>& psi_grid,
                                  const std::vector<double>& beta_values, double alpha_y,
                                  double alpha_c) {
    if (psi_grid.size() != beta_values.size()) {
        throw MisalignedInputs("psi_grid vs beta_values length");
    }
    ThetaProfile p;
    p.psi = psi_grid;
    const std::size_t n = psi_grid.size();
    p.catt_values.resize(n);
    p.bias_values.resize(n);
    p.theta_values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.catt_values[i] = catt(psi_grid[i], beta_values[i], alpha_c);
        p.bias_values[i] = baseline_bias(psi_grid[i], alpha_y);
        p.theta_values[i] = p.catt_values[i] + p.bias_values[i];
    }
    auto nondecreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] < v[i - 1]) return false;
        }
        return true;
    };
    p.catt_nondecreasing = nondecreasing(p.catt_values);
    p.bias_nondecreasing = nondecreasing(p.bias_values);
    p.theta_nondecreasing = nondecreasing(p.theta_values);
    return p;
}

} // namespace csl
