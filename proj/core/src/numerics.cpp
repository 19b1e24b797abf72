// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "scalekit/error.hpp"

namespace scalekit {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

struct LstsqResult {
    Eigen::VectorXd coeffs;
    Eigen::MatrixXd xtx_inverse;  // (X^T X)^{-1}, from R of the pivoted QR
};

// Shared QR solve with rank check. Throws naming the first column that is
// linearly dependent on the ones already pivoted in.
LstsqResult lstsq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const auto p = x.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < p) {
        const auto dependent = qr.colsPermutation().indices()[qr.rank()];
        throw Error("ols: design matrix is rank-deficient; column " +
                    std::to_string(dependent) + " is linearly dependent");
    }
    LstsqResult res;
    res.coeffs = qr.solve(y);
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    res.xtx_inverse = perm * (r_inv * r_inv.transpose()) * perm.transpose();
    return res;
}

}  // namespace

double OlsFit::std_error(std::size_t j) const { return std::sqrt(covariance(j, j)); }

OlsFit ols(const Matrix& design, std::span<const double> targets) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols();
    if (targets.size() != n)
        throw Error("ols: design has " + std::to_string(n) + " rows but " +
                    std::to_string(targets.size()) + " targets");
    if (n <= p)
        throw Error("ols: need n > p, got n = " + std::to_string(n) +
                    ", p = " + std::to_string(p));

    const Eigen::MatrixXd x = to_eigen(design);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(i) = targets[i];

    const LstsqResult sol = lstsq(x, y);
    const Eigen::VectorXd residuals = y - x * sol.coeffs;
    const double rss = residuals.squaredNorm();

    OlsFit fit;
    fit.n = static_cast<int>(n);
    fit.coeffs.assign(sol.coeffs.data(), sol.coeffs.data() + p);
    fit.residual_variance = rss / static_cast<double>(n - p);

    fit.covariance = Matrix(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            fit.covariance(i, j) = fit.residual_variance * sol.xtx_inverse(i, j);

    const double mean = y.mean();
    const double tss = (y.array() - mean).matrix().squaredNorm();
    if (tss > 0.0) {
        fit.r_squared = std::clamp(1.0 - rss / tss, 0.0, 1.0);
    } else {
        // Constant targets: a perfect fit scores 1, anything else 0.
        fit.r_squared = rss <= 1e-24 ? 1.0 : 0.0;
    }
    return fit;
}

ParabolaFit fit_parabola(std::span<const std::pair<double, double>> points) {
    std::set<double> distinct;
    for (const auto& [u, y] : points) distinct.insert(u);
    if (points.size() < 3 || distinct.size() < 3)
        throw Error("fit_parabola: parabola underdetermined, need >= 3 distinct u values, got " +
                    std::to_string(distinct.size()));

    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = points[i].first;
        x(i, 0) = 1.0;
        x(i, 1) = u;
        x(i, 2) = u * u;
        y(i) = points[i].second;
    }
    const Eigen::VectorXd coeffs = lstsq(x, y).coeffs;

    ParabolaFit fit;
    fit.c = coeffs(0);
    fit.b = coeffs(1);
    fit.a = coeffs(2);
    const double scale = std::max({1.0, std::abs(fit.b), std::abs(fit.c)});
    if (std::abs(fit.a) < 1e-12 * scale)
        throw Error("fit_parabola: degenerate parabola, |a| = " + std::to_string(std::abs(fit.a)));
    fit.vertex_u = -fit.b / (2.0 * fit.a);
    fit.vertex_y = fit.c - fit.b * fit.b / (4.0 * fit.a);
    return fit;
}

double PowerLaw::predict(double x) const {
    return std::exp(log_prefactor + exponent * std::log(x));
}

double PowerLaw::invert(double y) const {
    if (exponent == 0.0) throw Error("PowerLaw::invert: zero exponent is not invertible");
    return std::exp((std::log(y) - log_prefactor) / exponent);
}

PowerLaw fit_power_law(std::span<const std::pair<double, double>> points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
            throw Error("fit_power_law: nonpositive coordinate at index " + std::to_string(i));
    }

    Matrix design(points.size(), 2);
    std::vector<double> log_y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::log(points[i].first);
        log_y[i] = std::log(points[i].second);
    }
    const OlsFit fit = ols(design, log_y);

    PowerLaw law;
    law.log_prefactor = fit.coeffs[0];
    law.exponent = fit.coeffs[1];
    const double se = fit.std_error(1);
    law.exponent_ci95 = {law.exponent - 1.96 * se, law.exponent + 1.96 * se};
    law.r_squared = fit.r_squared;
    law.n = fit.n;
    return law;
}

}  // namespace scalekit
