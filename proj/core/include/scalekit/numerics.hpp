// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace scalekit {

// Dense row-major matrix, sized for regression design matrices and small
// coefficient covariances. Not a general linear-algebra type.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<const double> data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Ordinary least squares result with the coefficient covariance estimate
/// residual_variance * (X^T X)^{-1}, residual_variance = RSS / (n - p).
struct OlsFit {
    std::vector<double> coeffs;
    Matrix covariance;
    double residual_variance = 0.0;
    double r_squared = 0.0;
    int n = 0;

    double std_error(std::size_t j) const;
};

/// Least-squares fit of targets on the columns of design. Solved by
/// column-pivoted Householder QR; stable for condition numbers up to ~1e8.
/// Requires n > p and full column rank; a rank-deficient design raises an
/// error naming the dependent column.
OlsFit ols(const Matrix& design, std::span<const double> targets);

/// Quadratic y = a u^2 + b u + c with its vertex. Orientation is the sign
/// of a: positive opens upward (minimum at the vertex).
struct ParabolaFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double vertex_u = 0.0;  // -b / (2a)
    double vertex_y = 0.0;  // c - b^2 / (4a)

    bool opens_upward() const { return a > 0.0; }
    double evaluate(double u) const { return (a * u + b) * u + c; }
};

/// Least-squares parabola through (u, y) points. Needs at least 3 points
/// with 3 distinct u values; an (effectively) vanishing quadratic
/// coefficient is rejected as degenerate.
ParabolaFit fit_parabola(std::span<const std::pair<double, double>> points);

/// Fitted power law y = exp(log_prefactor) * x^exponent with a 95% normal
/// CI on the exponent (z = 1.96). Logs are natural throughout.
struct PowerLaw {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    std::pair<double, double> exponent_ci95{0.0, 0.0};
    double r_squared = 0.0;
    int n = 0;

    double predict(double x) const;
    /// x such that predict(x) == y; requires a nonzero exponent.
    double invert(double y) const;
};

/// Log-log OLS of y on x over strictly positive points. At least 3 points
/// are needed for the residual-variance estimate behind the CI; a
/// nonpositive coordinate is an error naming the offending index.
PowerLaw fit_power_law(std::span<const std::pair<double, double>> points);

}  // namespace scalekit
