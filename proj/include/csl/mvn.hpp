#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "csl/errors.hpp"
#include "csl/matrix.hpp"
#include "csl/rng.hpp"

namespace csl {

// Multivariate normal sampler over a possibly rank-deficient covariance.
// The factorization is a diagonally pivoted Cholesky: pivots that fall
// within `tol` of zero (relative to the largest initial diagonal) end the
// factorization and define the rank; a pivot more negative than that is an
// indefinite matrix and is rejected. The boundary case, e.g. equicorrelated
// rho = -1/(k-1), factors to rank k-1 and is accepted.
class MvnSampler {
public:
    MvnSampler(std::vector<double> mean, const Matrix& cov, double tol = 1e-10)
        : mean_(std::move(mean)), dim_(mean_.size()) {
        if (cov.rows() != dim_ || cov.cols() != dim_) {
            throw DimensionMismatch("covariance shape does not match mean length");
        }
        factor(cov, tol);
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t rank() const noexcept { return rank_; }

    std::vector<double> sample(RngStream& rng) const {
        std::vector<double> z(rank_);
        for (std::size_t r = 0; r < rank_; ++r) {
            z[r] = rng.standard_normal();
        }
        std::vector<double> x(mean_);
        for (std::size_t i = 0; i < dim_; ++i) {
            double acc = 0.0;
            for (std::size_t r = 0; r < rank_; ++r) {
                acc += l_[i * dim_ + r] * z[r];
            }
            x[i] += acc;
        }
        return x;
    }

private:
    void factor(const Matrix& cov, double tol) {
        l_.assign(dim_ * dim_, 0.0);
        std::vector<double> resid(dim_);
        double scale = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            resid[i] = cov(i, i);
            scale = std::max(scale, std::abs(resid[i]));
        }
        const double cut = tol * std::max(scale, 1.0);
        std::vector<char> chosen(dim_, 0);
        std::vector<std::size_t> order;
        order.reserve(dim_);
        rank_ = 0;
        for (std::size_t step = 0; step < dim_; ++step) {
            std::size_t pivot = dim_;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < dim_; ++i) {
                if (!chosen[i] && resid[i] > best) {
                    best = resid[i];
                    pivot = i;
                }
            }
            if (pivot == dim_ || best <= cut) {
                break;
            }
            const double l_pp = std::sqrt(best);
            l_[pivot * dim_ + step] = l_pp;
            chosen[pivot] = 1;
            order.push_back(pivot);
            for (std::size_t i = 0; i < dim_; ++i) {
                if (chosen[i]) {
                    continue;
                }
                double v = cov(i, pivot);
                for (std::size_t s = 0; s < step; ++s) {
                    v -= l_[i * dim_ + s] * l_[pivot * dim_ + s];
                }
                v /= l_pp;
                l_[i * dim_ + step] = v;
                resid[i] -= v * v;
            }
            ++rank_;
        }
        // For a PSD input, once the largest residual diagonal is ~0 the whole
        // remaining Schur complement is ~0 (|S_ij| <= sqrt(S_ii S_jj)). A large
        // leftover off-diagonal therefore means the matrix is indefinite even
        // though no diagonal ever went clearly negative.
        for (std::size_t i = 0; i < dim_; ++i) {
            if (chosen[i]) {
                continue;
            }
            if (resid[i] < -cut) {
                throw NotPositiveSemiDefinite("covariance has a negative residual pivot");
            }
            for (std::size_t j = i + 1; j < dim_; ++j) {
                if (chosen[j]) {
                    continue;
                }
                double s = cov(i, j);
                for (std::size_t r = 0; r < rank_; ++r) {
                    s -= l_[i * dim_ + r] * l_[j * dim_ + r];
                }
                if (std::abs(s) > cut) {
                    throw NotPositiveSemiDefinite("covariance has a residual off-diagonal");
                }
            }
        }
    }

    std::vector<double> mean_;
    std::size_t dim_;
    std::size_t rank_ = 0;
    std::vector<double> l_; // dim x dim, columns beyond rank_ are zero
};

// One-shot draw; factor once with MvnSampler when sampling repeatedly.
inline std::vector<double> mvn_sample(const std::vector<double>& mean, const Matrix& cov,
                                      RngStream& rng, double tol = 1e-10) {
    return MvnSampler(mean, cov, tol).sample(rng);
}

} // namespace csl
