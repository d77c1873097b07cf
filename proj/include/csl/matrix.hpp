#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "csl/errors.hpp"

namespace csl {

// Dense row-major matrix for the small problems in this library: covariance
// inputs, normal-equation systems, heatmap grids. Not tuned for large n.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size());
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != m.cols_) {
                throw DimensionMismatch("ragged row in matrix literal");
            }
            std::size_t j = 0;
            for (double v : row) {
                m(i, j++) = v;
            }
            ++i;
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Symmetric equicorrelation matrix: unit diagonal, `rho` everywhere else.
inline Matrix equicorrelated(std::size_t k, double rho) {
    Matrix m(k, k, rho);
    for (std::size_t i = 0; i < k; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

namespace detail {

// Solves the symmetric positive definite system A x = b in place via
// unpivoted Cholesky. Dimensions here are tiny (feature counts), so no
// blocking or pivoting is needed; a non-positive pivot throws.
inline std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw DimensionMismatch("solve_spd needs square A and matching b");
    }
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t s = 0; s < j; ++s) {
            d -= a(j, s) * a(j, s);
        }
        if (!(d > 0.0)) {
            throw NotPositiveSemiDefinite("non-positive pivot in Cholesky solve");
        }
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t s = 0; s < j; ++s) {
                v -= a(i, s) * a(j, s);
            }
            a(i, j) = v / l;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t s = 0; s < i; ++s) {
            v -= a(i, s) * b[s];
        }
        b[i] = v / a(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t s = ii + 1; s < n; ++s) {
            v -= a(s, ii) * b[s];
        }
        b[ii] = v / a(ii, ii);
    }
    return b;
}

} // namespace detail

} // namespace csl
