#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "csl/dataset.hpp"
#include "csl/errors.hpp"
#include "csl/interpret.hpp"
#include "csl/matrix.hpp"
#include "csl/mvn.hpp"
#include "csl/normal.hpp"
#include "csl/rng.hpp"

namespace csl {

// Piecewise-linear single-valued function given by strictly increasing knot
// positions. Extrapolates linearly from the end segments so a strictly
// monotone table stays strictly monotone off the grid.
class MonotoneTable {
public:
    MonotoneTable() = default;

    MonotoneTable(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size()) {
            throw LengthMismatch("table knot counts");
        }
        if (x_.size() < 2) {
            throw InvalidConfig("function table needs at least 2 knots");
        }
        for (std::size_t i = 1; i < x_.size(); ++i) {
            if (!(x_[i] > x_[i - 1])) {
                throw InvalidConfig("table knots must be strictly increasing in x");
            }
        }
    }

    static MonotoneTable identity() {
        return MonotoneTable({-1.0, 1.0}, {-1.0, 1.0});
    }

    static MonotoneTable sampled(double lo, double hi, std::size_t knots,
                                 const auto& fn) {
        if (knots < 2 || !(hi > lo)) {
            throw InvalidConfig("sampled table needs hi > lo and >= 2 knots");
        }
        std::vector<double> x(knots), y(knots);
        for (std::size_t i = 0; i < knots; ++i) {
            x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(knots - 1);
            y[i] = fn(x[i]);
        }
        return MonotoneTable(std::move(x), std::move(y));
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        if (x <= x_[0]) {
            return y_[0] + (y_[1] - y_[0]) / (x_[1] - x_[0]) * (x - x_[0]);
        }
        if (x >= x_[n - 1]) {
            return y_[n - 1] +
                   (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]) * (x - x_[n - 1]);
        }
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - x_.begin());
        const double t = (x - x_[j - 1]) / (x_[j] - x_[j - 1]);
        return y_[j - 1] + t * (y_[j] - y_[j - 1]);
    }

    bool strictly_increasing() const {
        for (std::size_t i = 1; i < y_.size(); ++i) {
            if (!(y_[i] > y_[i - 1])) return false;
        }
        return true;
    }

    bool strictly_decreasing() const {
        for (std::size_t i = 1; i < y_.size(); ++i) {
            if (!(y_[i] < y_[i - 1])) return false;
        }
        return true;
    }

    const std::vector<double>& knots_x() const noexcept { return x_; }
    const std::vector<double>& knots_y() const noexcept { return y_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

// ---- Nudge family ----

enum class NudgeNoise { logistic, probit };

struct HeterogeneousNudge {
    double eta = 0.1;        // sd(delta(x)) / sd(mu(x))
    double rho = 0.9;        // corr(mu(x), delta(x))
    double delta_mean = 0.5;
};

struct NudgeConfig {
    double delta = 0.5;
    double mu_mean = -3.0;
    double mu_sd = 1.0;
    std::optional<HeterogeneousNudge> heterogeneous;
    NudgeNoise noise = NudgeNoise::logistic;
};

// Score target without treatment for the logistic utility model.
inline double nudge_cas(double mu) {
    return sigmoid(mu);
}

// Effect of the nudge at latent index mu; bell-shaped with the peak at
// mu = -delta/2 by the symmetry of the logistic.
inline double nudge_cate(double mu, double delta) {
    return sigmoid(mu + delta) - sigmoid(mu);
}

namespace detail {

inline double link_cdf(double x, NudgeNoise noise) {
    return noise == NudgeNoise::logistic ? sigmoid(x) : norm_cdf(x);
}

inline double draw_link_noise(RngStream& rng, NudgeNoise noise) {
    if (noise == NudgeNoise::probit) {
        return rng.standard_normal();
    }
    const double u = rng.uniform_pos();
    return std::log(u) - std::log1p(-u);
}

} // namespace detail

inline SimulatedExperiment simulate_nudge(const NudgeConfig& cfg, std::size_t n,
                                          RngStream rng) {
    if (n < 1) {
        throw InvalidConfig("simulate_nudge needs n >= 1");
    }
    if (!(cfg.mu_sd >= 0.0)) {
        throw InvalidConfig("mu_sd must be nonnegative");
    }
    std::optional<MvnSampler> joint;
    if (cfg.heterogeneous) {
        const auto& het = *cfg.heterogeneous;
        if (!(het.eta >= 0.0)) {
            throw InvalidConfig("eta must be nonnegative");
        }
        if (!(std::abs(het.rho) <= 1.0)) {
            throw InvalidConfig("rho must lie in [-1, 1]");
        }
        const double v = cfg.mu_sd * cfg.mu_sd;
        Matrix cov(2, 2);
        cov(0, 0) = v;
        cov(0, 1) = cov(1, 0) = het.rho * het.eta * v;
        cov(1, 1) = het.eta * het.eta * v;
        joint.emplace(std::vector<double>{cfg.mu_mean, het.delta_mean}, cov);
    }

    const std::size_t m = cfg.heterogeneous ? 2 : 1;
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    std::vector<std::uint8_t> t(n);
    std::vector<double> y(n);
    OracleTruth oracle;
    oracle.cate.resize(n);
    oracle.cas.resize(n);
    oracle.latent_mean.resize(n);
    oracle.y0.resize(n);
    oracle.y1.resize(n);

    RngStream units = rng.substream(1);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream u = units.substream(i);
        double mu, delta;
        if (joint) {
            const auto draw = joint->sample(u);
            mu = draw[0];
            delta = draw[1];
            cols[0][i] = mu;
            cols[1][i] = delta;
        } else {
            mu = u.normal(cfg.mu_mean, cfg.mu_sd);
            delta = cfg.delta;
            cols[0][i] = mu;
        }
        const double eps = detail::draw_link_noise(u, cfg.noise);
        const double y0 = (mu + eps > 0.0) ? 1.0 : 0.0;
        const double y1 = (mu + delta + eps > 0.0) ? 1.0 : 0.0;
        const bool treated = u.bernoulli(0.5);
        t[i] = treated ? 1 : 0;
        y[i] = treated ? y1 : y0;
        oracle.cas[i] = detail::link_cdf(mu, cfg.noise);
        oracle.cate[i] = detail::link_cdf(mu + delta, cfg.noise) - oracle.cas[i];
        oracle.latent_mean[i] = mu;
        oracle.y0[i] = y0;
        oracle.y1[i] = y1;
    }
    std::vector<std::string> names = {"mu"};
    if (cfg.heterogeneous) {
        names.push_back("delta");
    }
    ExperimentDataset ds(std::move(cols), std::move(t), std::move(y), std::nullopt,
                         std::move(names));
    oracle.validate(ds.n());
    return {std::move(ds), std::move(oracle)};
}

// ---- Surrogate-index family ----

struct SurrogateConfig {
    std::size_t k = 2;       // latent mediators
    double rho_L = 0.0;      // equicorrelation of mediator means, >= -1/(k-1)
    double rho_gamma = 0.0;  // correlation of log-loadings
};

struct SurrogateLoadings {
    std::vector<double> gamma;       // primary-outcome loadings e^A
    std::vector<double> gamma_tilde; // surrogate loadings e^B
};

inline SimulatedExperiment simulate_surrogate(const SurrogateConfig& cfg, std::size_t n,
                                              RngStream rng,
                                              SurrogateLoadings* recorded = nullptr) {
    if (cfg.k < 1 || n < 1) {
        throw InvalidConfig("simulate_surrogate needs k >= 1 and n >= 1");
    }
    if (!(std::abs(cfg.rho_gamma) <= 1.0)) {
        throw InvalidConfig("rho_gamma must lie in [-1, 1]");
    }
    if (cfg.k >= 2) {
        const double bound = -1.0 / static_cast<double>(cfg.k - 1);
        if (cfg.rho_L < bound || cfg.rho_L > 1.0) {
            throw InvalidConfig("rho_L outside [-1/(k-1), 1]");
        }
    }

    RngStream globals = rng.substream(2);
    SurrogateLoadings loadings;
    loadings.gamma.resize(cfg.k);
    loadings.gamma_tilde.resize(cfg.k);
    {
        Matrix cov(2, 2);
        cov(0, 0) = cov(1, 1) = 1.0;
        cov(0, 1) = cov(1, 0) = cfg.rho_gamma;
        MvnSampler pair({0.0, 0.0}, cov);
        RngStream g = globals.substream(0);
        for (std::size_t j = 0; j < cfg.k; ++j) {
            const auto ab = pair.sample(g);
            loadings.gamma[j] = std::exp(ab[0]);
            loadings.gamma_tilde[j] = std::exp(ab[1]);
        }
    }
    if (recorded) {
        *recorded = loadings;
    }

    MvnSampler mu_draw(std::vector<double>(cfg.k, 0.0), equicorrelated(cfg.k, cfg.rho_L));

    std::vector<std::vector<double>> cols(cfg.k, std::vector<double>(n));
    std::vector<std::uint8_t> t(n);
    std::vector<double> y(n), surrogate(n);
    OracleTruth oracle;
    oracle.cate.resize(n);
    oracle.cas.resize(n);
    oracle.y0.resize(n);
    oracle.y1.resize(n);

    RngStream units = rng.substream(1);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream u = units.substream(i);
        const auto mu = mu_draw.sample(u);
        double c = 0.0, s = 0.0, cate = 0.0, cas = 0.0;
        for (std::size_t j = 0; j < cfg.k; ++j) {
            cols[j][i] = mu[j];
            const double l = mu[j] + u.standard_normal();
            c += loadings.gamma[j] * l;
            s += loadings.gamma_tilde[j] * l;
            cate += loadings.gamma[j] * mu[j];
            cas += loadings.gamma_tilde[j] * mu[j];
        }
        const double y0 = u.standard_normal();
        const double s0 = u.standard_normal();
        const bool treated = u.bernoulli(0.5);
        t[i] = treated ? 1 : 0;
        y[i] = y0 + (treated ? c : 0.0);
        surrogate[i] = s0 + (treated ? s : 0.0);
        oracle.cate[i] = cate;
        oracle.cas[i] = cas;
        oracle.y0[i] = y0;
        oracle.y1[i] = y0 + c;
    }
    ExperimentDataset ds(std::move(cols), std::move(t), std::move(y), std::move(surrogate));
    oracle.validate(ds.n());
    return {std::move(ds), std::move(oracle)};
}

// ---- Self-selection family ----

// beta(psi) link: linear by default, monotone table override for stress
// shapes (e.g. convex effects).
struct BetaLink {
    double b0 = 0.0;
    double b1 = 1.0;
    std::optional<MonotoneTable> table;

    double operator()(double psi) const {
        return table ? (*table)(psi) : b0 + b1 * psi;
    }
};

struct SelfSelectionConfig {
    double alpha_y = 0.0;          // E[e_y | e_u] slope
    double alpha_c = 0.0;          // E[e_c | e_u] slope
    std::vector<double> zeta = {1.0}; // coefficients of zeta(x)
    std::vector<double> psi = {1.0};  // coefficients of psi(x)
    BetaLink beta_fn;
    double noise_sd_y = 1.0;       // sd of the residual part of e_y
    double noise_sd_c = 1.0;       // sd of the residual part of e_c
};

inline SimulatedExperiment simulate_self_selection(const SelfSelectionConfig& cfg,
                                                   std::size_t n, RngStream rng) {
    if (n < 1) {
        throw InvalidConfig("simulate_self_selection needs n >= 1");
    }
    const std::size_t m = cfg.psi.size();
    if (m == 0 || cfg.zeta.size() != m) {
        throw InvalidConfig("psi and zeta coefficient vectors must be nonempty and aligned");
    }
    if (!(cfg.noise_sd_y >= 0.0) || !(cfg.noise_sd_c >= 0.0)) {
        throw InvalidConfig("noise sds must be nonnegative");
    }

    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    std::vector<std::uint8_t> t(n);
    std::vector<double> y(n);
    OracleTruth oracle;
    oracle.cate.resize(n);
    oracle.cas.resize(n);
    oracle.latent_mean.resize(n);
    oracle.y0.resize(n);
    oracle.y1.resize(n);

    RngStream units = rng.substream(1);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream u = units.substream(i);
        double psi_x = 0.0, zeta_x = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double xij = u.standard_normal();
            cols[j][i] = xij;
            psi_x += cfg.psi[j] * xij;
            zeta_x += cfg.zeta[j] * xij;
        }
        const double eps_u = u.standard_normal();
        const double eps_y = cfg.alpha_y * eps_u + u.normal(0.0, cfg.noise_sd_y);
        const double eps_c = cfg.alpha_c * eps_u + u.normal(0.0, cfg.noise_sd_c);
        const double beta = cfg.beta_fn(psi_x);
        const double y0 = zeta_x + eps_y;
        const double c = beta + eps_c;
        const bool treated = psi_x + eps_u > 0.0;
        t[i] = treated ? 1 : 0;
        y[i] = y0 + (treated ? c : 0.0);
        oracle.cate[i] = beta;
        oracle.cas[i] = catt(psi_x, beta, cfg.alpha_c) + baseline_bias(psi_x, cfg.alpha_y);
        oracle.latent_mean[i] = psi_x;
        oracle.y0[i] = y0;
        oracle.y1[i] = y0 + c;
    }
    ExperimentDataset ds(std::move(cols), std::move(t), std::move(y));
    oracle.validate(ds.n());
    return {std::move(ds), std::move(oracle)};
}

// ---- Generic latent-mediation family ----

struct GenericLatentConfig {
    MonotoneTable g = MonotoneTable::identity(); // effect link: beta = g(mu)
    MonotoneTable h = MonotoneTable::identity(); // score link: theta = h(mu)
    double mu_mean = 0.0;
    double mu_sd = 1.0;
    double outcome_noise_sd = 0.5;
};

inline SimulatedExperiment simulate_generic_latent(const GenericLatentConfig& cfg,
                                                   std::size_t n, RngStream rng) {
    if (n < 1) {
        throw InvalidConfig("simulate_generic_latent needs n >= 1");
    }
    if (!(cfg.mu_sd >= 0.0) || !(cfg.outcome_noise_sd >= 0.0)) {
        throw InvalidConfig("sds must be nonnegative");
    }
    std::vector<std::vector<double>> cols(1, std::vector<double>(n));
    std::vector<std::uint8_t> t(n);
    std::vector<double> y(n), surrogate(n);
    OracleTruth oracle;
    oracle.cate.resize(n);
    oracle.cas.resize(n);
    oracle.latent_mean.resize(n);
    oracle.y0.resize(n);
    oracle.y1.resize(n);

    RngStream units = rng.substream(1);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream u = units.substream(i);
        const double mu = u.normal(cfg.mu_mean, cfg.mu_sd);
        cols[0][i] = mu;
        const double y0 = u.normal(0.0, cfg.outcome_noise_sd);
        const double c = cfg.g(mu) + u.normal(0.0, cfg.outcome_noise_sd);
        const double s0 = u.normal(0.0, cfg.outcome_noise_sd);
        const double s_inc = cfg.h(mu) + u.normal(0.0, cfg.outcome_noise_sd);
        const bool treated = u.bernoulli(0.5);
        t[i] = treated ? 1 : 0;
        y[i] = y0 + (treated ? c : 0.0);
        surrogate[i] = s0 + (treated ? s_inc : 0.0);
        oracle.cate[i] = cfg.g(mu);
        oracle.cas[i] = cfg.h(mu);
        oracle.latent_mean[i] = mu;
        oracle.y0[i] = y0;
        oracle.y1[i] = y0 + c;
    }
    ExperimentDataset ds({std::move(cols[0])}, std::move(t), std::move(y),
                         std::move(surrogate), {"mu"});
    oracle.validate(ds.n());
    return {std::move(ds), std::move(oracle)};
}

// ---- Tagged family dispatch (CLI configuration) ----

using DgpSpec =
    std::variant<NudgeConfig, SurrogateConfig, SelfSelectionConfig, GenericLatentConfig>;

inline SimulatedExperiment simulate(const DgpSpec& spec, std::size_t n, RngStream rng) {
    return std::visit(
        [&](const auto& cfg) -> SimulatedExperiment {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, NudgeConfig>) {
                return simulate_nudge(cfg, n, rng);
            } else if constexpr (std::is_same_v<T, SurrogateConfig>) {
                return simulate_surrogate(cfg, n, rng);
            } else if constexpr (std::is_same_v<T, SelfSelectionConfig>) {
                return simulate_self_selection(cfg, n, rng);
            } else {
                return simulate_generic_latent(cfg, n, rng);
            }
        },
        spec);
}

inline const char* family_name(const DgpSpec& spec) {
    switch (spec.index()) {
        case 0: return "nudge";
        case 1: return "surrogate";
        case 2: return "self_selection";
        default: return "generic_latent";
    }
}

} // namespace csl
