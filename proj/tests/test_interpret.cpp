#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "csl/interpret.hpp"
#include "csl/rng.hpp"

using namespace csl;

TEST_CASE("check_eo basic verdicts", "[interpret]") {
    auto v = check_eo({1, 2, 3}, {10, 20, 30});
    REQUIRE(v.valid);
    REQUIRE(v.violations == 0);
    REQUIRE(v.ties == 0);

    v = check_eo({1, 3, 2}, {1, 2, 3});
    REQUIRE_FALSE(v.valid);
    REQUIRE(v.violations == 1);

    v = check_eo({1, 1, 2}, {1, 2, 3});
    REQUIRE(v.valid);
    REQUIRE(v.violations == 0);
    REQUIRE(v.ties == 1);

    REQUIRE_THROWS_AS(check_eo({1, 2}, {1, 2, 3}), LengthMismatch);
    REQUIRE_THROWS_AS(check_eo({1}, {1}), TooFewUnits);
}

TEST_CASE("eo fast path agrees with brute force", "[interpret]") {
    RngStream rng(314, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.below(300);
        std::vector<double> theta(n), beta(n);
        // Small integer alphabets make ties frequent.
        const int alphabet = 1 + static_cast<int>(rng.below(trial % 3 == 0 ? 4 : 1000));
        for (std::size_t i = 0; i < n; ++i) {
            theta[i] = static_cast<double>(rng.below(alphabet));
            beta[i] = static_cast<double>(rng.below(alphabet));
        }
        const auto brute = eo_pair_counts_brute(theta, beta);
        const auto fast = eo_pair_counts_fast(theta, beta);
        REQUIRE(brute.discordant == fast.discordant);
        REQUIRE(brute.ties == fast.ties);
    }
}

TEST_CASE("check_ec examples", "[interpret]") {
    auto v = check_ec({10, 20, 5}, {2, 6, 1}, 3.0);
    REQUIRE(v.valid);
    REQUIRE(v.violations == 0);
    REQUIRE(v.threshold_interval.has_value());
    REQUIRE(v.threshold_interval->low == Catch::Approx(10.0));
    REQUIRE(v.threshold_interval->high == Catch::Approx(20.0));

    v = check_ec({1, 2}, {5, 0}, 3.0);
    REQUIRE_FALSE(v.valid);
    REQUIRE(v.violations > 0);
    REQUIRE_FALSE(v.threshold_interval.has_value());

    // Cutoff above every effect: selecting nobody is a valid classification.
    v = check_ec({1, 2, 3}, {0, 0, 0}, 1.0);
    REQUIRE(v.valid);
    REQUIRE(v.threshold_interval->low == 3.0);
    REQUIRE(std::isinf(v.threshold_interval->high));

    REQUIRE_THROWS_AS(check_ec({1, 2}, {1, 2, 3}, 0.0), LengthMismatch);
}

TEST_CASE("ec violations count the best threshold's mistakes", "[interpret]") {
    // High set {beta > 0} = units 0 and 2 with scores {1, 3}; low unit has 2.
    // Best strict threshold keeps one mistake.
    auto v = check_ec({1, 2, 3}, {1, -1, 1}, 0.0);
    REQUIRE_FALSE(v.valid);
    REQUIRE(v.violations == 1);
}

TEST_CASE("valid EO implies valid EC on a tau grid", "[interpret]") {
    RngStream rng(42, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(100);
        std::vector<double> beta(n), theta(n);
        for (std::size_t i = 0; i < n; ++i) {
            beta[i] = rng.normal(0.0, 2.0);
        }
        const double a = 0.5 + rng.uniform();
        const double b = rng.normal(0.0, 1.0);
        const int form = static_cast<int>(rng.below(3));
        for (std::size_t i = 0; i < n; ++i) {
            switch (form) {
                case 0: theta[i] = a * beta[i] + b; break;
                case 1: theta[i] = std::atan(beta[i]) * a + b; break;
                default: theta[i] = std::exp(a * beta[i]) + b; break;
            }
        }
        if (!check_eo(theta, beta).valid) {
            continue; // exp overflow ties are possible; EO validity is the premise
        }
        const auto [lo_it, hi_it] = std::minmax_element(beta.begin(), beta.end());
        const double lo = *lo_it - 0.5, hi = *hi_it + 0.5;
        for (int g = 0; g < 100; ++g) {
            const double tau = lo + (hi - lo) * g / 99.0;
            REQUIRE(check_ec(theta, beta, tau).valid);
        }
    }
}

TEST_CASE("synchrony ratio statistics", "[interpret]") {
    std::vector<double> g = {1.0, 2.0, 4.0, -1.0};
    std::vector<double> h;
    for (double v : g) h.push_back(2.0 * v);
    auto r = check_synchrony(g, h);
    REQUIRE(r.pair_count == 6);
    REQUIRE(r.zero_denominator_pairs == 0);
    REQUIRE(r.min_ratio == Catch::Approx(2.0));
    REQUIRE(r.fraction_positive == 1.0);
    REQUIRE(r.fraction_above_one == 1.0);
    REQUIRE(r.synchrony());
    REQUIRE(r.bias_helps());

    h.clear();
    for (double v : g) h.push_back(0.5 * v);
    r = check_synchrony(g, h);
    REQUIRE(r.synchrony());
    REQUIRE(r.fraction_above_one == 0.0);
    REQUIRE_FALSE(r.bias_helps());

    r = check_synchrony({1.0, 1.0, 2.0}, {1.0, 5.0, 9.0});
    REQUIRE(r.zero_denominator_pairs == 1);
    REQUIRE(r.pair_count == 2);

    REQUIRE_THROWS_AS(check_synchrony({1.0}, {1.0}), TooFewUnits);
    REQUIRE_THROWS_AS(check_synchrony({1.0, 2.0}, {1.0}), LengthMismatch);
}

TEST_CASE("proposition 1: EE implies EO and synchrony", "[interpret]") {
    RngStream rng(7, 0);
    std::vector<double> beta(50);
    for (double& b : beta) b = rng.normal(0.0, 1.0);
    REQUIRE(check_eo(beta, beta).valid);
    auto r = check_synchrony(beta, beta);
    REQUIRE(r.synchrony());
    REQUIRE(r.min_ratio == Catch::Approx(1.0));
}

TEST_CASE("truncated normal moments", "[interpret]") {
    REQUIRE(trunc_norm_mean_above(0.0) == Catch::Approx(0.79788).margin(1e-5));
    REQUIRE(trunc_norm_var_above(0.0) == Catch::Approx(0.36338).margin(1e-5));
    REQUIRE(trunc_norm_mean_above(1.0) == Catch::Approx(1.52514).margin(1e-5));

    // No-truncation limit.
    REQUIRE(trunc_norm_mean_above(-40.0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(trunc_norm_var_above(-40.0) == Catch::Approx(1.0).margin(1e-12));

    // Far tail: mean - a approaches 1/a.
    REQUIRE(trunc_norm_mean_above(50.0) - 50.0 == Catch::Approx(0.02).margin(2e-5));
    REQUIRE(trunc_norm_var_above(50.0) == Catch::Approx(1.0 / 2500.0).margin(1e-5));
    // Continuity across the asymptotic switch.
    REQUIRE(trunc_norm_mean_above(34.0 - 1e-9) ==
            Catch::Approx(trunc_norm_mean_above(34.0 + 1e-9)).epsilon(1e-9));

    // Spot MC cross-check by sampling the truncated region directly.
    for (double a : {-1.0, 0.0, 1.5}) {
        RngStream rng(1234, static_cast<std::uint64_t>(a * 8 + 100));
        const double pa = norm_cdf(a);
        const int draws = 2000000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < draws; ++i) {
            const double u = pa + (1.0 - pa) * rng.uniform();
            const double z = norm_cdf_inv(u);
            s += z;
            s2 += z * z;
        }
        const double mean = s / draws;
        const double var = s2 / draws - mean * mean;
        REQUIRE(trunc_norm_mean_above(a) == Catch::Approx(mean).margin(2e-3));
        REQUIRE(trunc_norm_var_above(a) == Catch::Approx(var).margin(2e-3));
    }
}

TEST_CASE("baseline bias values and symmetry", "[interpret]") {
    REQUIRE(baseline_bias(0.0, 1.0) == Catch::Approx(1.59577).margin(1e-5));
    REQUIRE(baseline_bias(2.3, 0.0) == 0.0);

    // Central difference at psi = 0 vanishes by symmetry.
    const double h = 1e-4;
    const double d0 = (baseline_bias(h, 1.0) - baseline_bias(-h, 1.0)) / (2 * h);
    REQUIRE(std::abs(d0) < 1e-5);

    for (double alpha_y : {1.3, -0.7}) {
        for (double psi : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
            const double d =
                (baseline_bias(psi + h, alpha_y) - baseline_bias(psi - h, alpha_y)) / (2 * h);
            REQUIRE(d * (psi * alpha_y) > 0.0);
        }
    }
}

TEST_CASE("catt closed form", "[interpret]") {
    REQUIRE(catt(0.7, 2.5, 0.0) == 2.5);
    REQUIRE(catt(0.0, 1.0, 0.5) == Catch::Approx(1.39894).margin(1e-5));
}

TEST_CASE("assumption 3 check", "[interpret]") {
    REQUIRE(check_assumption3({0.5, 1.0, 2.0}, 1.0));
    REQUIRE_FALSE(check_assumption3({-0.5, 1.0}, 1.0));
    REQUIRE(check_assumption3({-0.5, -1.0}, -2.0));
    REQUIRE_FALSE(check_assumption3({0.5, 1.0}, 0.0));
}

TEST_CASE("assumption 4 check", "[interpret]") {
    REQUIRE(check_assumption4({1.0, 1.0}, -0.5, {0.3, 0.6}));
    // Linear beta with slope alpha_c > 0 always passes since 1 - p < 1.
    REQUIRE(check_assumption4({0.7, 0.7, 0.7}, 0.7, {0.1, 0.5, 0.9}));
    REQUIRE_FALSE(check_assumption4({0.1}, 1.0, {0.2}));
    REQUIRE_THROWS_AS(check_assumption4({0.1, 0.2}, 1.0, {0.2}), MisalignedInputs);
    REQUIRE_THROWS_AS(check_assumption4({0.1}, 1.0, {1.2}), MisalignedInputs);
}

TEST_CASE("assumption 4 implies nondecreasing catt along psi", "[interpret]") {
    const double alpha_c = -0.8; // negative differential bias: assumption holds for rising beta
    std::vector<double> psi_grid, beta_vals, dbeta, p_tilde;
    for (int i = 0; i <= 60; ++i) {
        const double psi = -3.0 + 6.0 * i / 60.0;
        psi_grid.push_back(psi);
        beta_vals.push_back(1.0 + 0.5 * psi);
        dbeta.push_back(0.5);
        p_tilde.push_back(trunc_norm_var_above(-psi));
    }
    REQUIRE(check_assumption4(dbeta, alpha_c, p_tilde));
    double prev = catt(psi_grid[0], beta_vals[0], alpha_c);
    for (std::size_t i = 1; i < psi_grid.size(); ++i) {
        const double cur = catt(psi_grid[i], beta_vals[i], alpha_c);
        REQUIRE(cur >= prev - 1e-12);
        prev = cur;
    }
}

TEST_CASE("theta profile reports component monotonicity", "[interpret]") {
    std::vector<double> psi_grid, beta_vals;
    for (int i = 0; i < 50; ++i) {
        const double psi = 0.1 + 2.9 * i / 49.0;
        psi_grid.push_back(psi);
        beta_vals.push_back(1.0 + 0.8 * psi);
    }
    auto p = theta_profile(psi_grid, beta_vals, 1.0, -0.5);
    REQUIRE(p.catt_nondecreasing);
    REQUIRE(p.bias_nondecreasing);
    REQUIRE(p.theta_nondecreasing);
    REQUIRE_THROWS_AS(theta_profile({1.0}, {1.0, 2.0}, 1.0, 1.0), MisalignedInputs);
}
