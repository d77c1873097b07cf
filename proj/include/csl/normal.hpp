#pragma once

#include <cmath>
#include <limits>

#include "csl/errors.hpp"

namespace csl {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;

inline double norm_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Standard normal CDF through erfc, which keeps relative accuracy in the
// lower tail where 1 - erf would cancel.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

// Upper tail P[Z > x], accurate for large positive x.
inline double norm_sf(double x) {
    return 0.5 * std::erfc(x * kInvSqrt2);
}

namespace detail {

// Acklam's rational approximation to the normal quantile (~1.15e-9), used
// as the starting point for one Halley refinement below.
inline double norm_cdf_inv_estimate(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

// Normal quantile: Acklam estimate polished with a Halley step against the
// erfc-based CDF, giving close to full double precision on (0, 1).
inline double norm_cdf_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw InvalidConfig("norm_cdf_inv requires p in [0, 1]");
    }
    double x = detail::norm_cdf_inv_estimate(p);
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidConfig("logit requires p in (0, 1)");
    }
    return std::log(p / (1.0 - p));
}

} // namespace csl
