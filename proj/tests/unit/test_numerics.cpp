// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "scalekit/error.hpp"
#include "scalekit/numerics.hpp"

using namespace scalekit;

namespace {

Matrix line_design(const std::vector<double>& xs) {
    Matrix design(xs.size(), 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = xs[i];
    }
    return design;
}

}  // namespace

TEST_CASE("ols recovers an exact line with zero residual variance") {
    const std::vector<double> xs = {0, 1, 2, 3};
    const std::vector<double> ys = {1, 3, 5, 7};  // y = 2x + 1
    const OlsFit fit = ols(line_design(xs), ys);
    CHECK(fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.coeffs[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.residual_variance == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.n == 4);
}

TEST_CASE("ols rejects a duplicated column naming the dependent one") {
    Matrix design(5, 3);
    std::vector<double> ys(5);
    for (std::size_t i = 0; i < 5; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = static_cast<double>(i);
        design(i, 2) = static_cast<double>(i);  // duplicate
        ys[i] = static_cast<double>(2 * i);
    }
    CHECK_THROWS_WITH_AS(ols(design, ys), doctest::Contains("rank-deficient"), Error);
}

TEST_CASE("ols rejects n <= p") {
    const std::vector<double> xs = {1.0, 2.0};
    const std::vector<double> ys = {1.0, 2.0};
    CHECK_THROWS_WITH_AS(ols(line_design(xs), ys), doctest::Contains("n > p"), Error);
}

TEST_CASE("ols coefficients land within 3 standard errors almost always") {
    // Monte Carlo over a noisy line: both coefficients inside +-3 SE in at
    // least 99% of seeded trials.
    const int trials = 1000;
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(9000 + static_cast<std::uint64_t>(t));
        std::vector<double> xs(200), ys(200);
        for (int i = 0; i < 200; ++i) {
            xs[i] = static_cast<double>(i) / 199.0;
            ys[i] = 1.0 + 2.0 * xs[i] + 0.1 * rng.normal();
        }
        const OlsFit fit = ols(line_design(xs), ys);
        const bool hit0 = std::abs(fit.coeffs[0] - 1.0) <= 3.0 * fit.std_error(0);
        const bool hit1 = std::abs(fit.coeffs[1] - 2.0) <= 3.0 * fit.std_error(1);
        if (hit0 && hit1) ++ok;
    }
    CHECK(ok >= 990);
}

TEST_CASE("ols residuals are orthogonal to the design") {
    Rng rng(11);
    Matrix design(40, 3);
    std::vector<double> ys(40);
    for (std::size_t i = 0; i < 40; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rng.normal();
        design(i, 2) = rng.normal();
        ys[i] = 0.5 - design(i, 1) + 2.0 * design(i, 2) + 0.3 * rng.normal();
    }
    const OlsFit fit = ols(design, ys);
    double y_scale = 0.0;
    for (double y : ys) y_scale = std::max(y_scale, std::abs(y));
    for (std::size_t j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < 40; ++i) {
            const double fitted =
                fit.coeffs[0] * design(i, 0) + fit.coeffs[1] * design(i, 1) + fit.coeffs[2] * design(i, 2);
            dot += design(i, j) * (ys[i] - fitted);
        }
        CHECK(std::abs(dot) <= 1e-8 * y_scale * 40);
    }
}

TEST_CASE("fit_parabola on three exact points") {
    const std::vector<std::pair<double, double>> points = {{1, 1}, {2, 0}, {3, 1}};
    const ParabolaFit fit = fit_parabola(points);
    CHECK(fit.a == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.b == doctest::Approx(-4.0).epsilon(1e-10));
    CHECK(fit.c == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(fit.vertex_u == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.vertex_y == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.opens_upward());
}

TEST_CASE("fit_parabola rejects collinear points as degenerate") {
    const std::vector<std::pair<double, double>> points = {{0, 0}, {1, 1}, {2, 2}};
    CHECK_THROWS_WITH_AS(fit_parabola(points), doctest::Contains("degenerate"), Error);
}

TEST_CASE("fit_parabola rejects fewer than 3 distinct u values") {
    const std::vector<std::pair<double, double>> points = {{1, 1}, {1, 2}, {2, 0}, {2, 1}};
    CHECK_THROWS_WITH_AS(fit_parabola(points), doctest::Contains("underdetermined"), Error);
}

TEST_CASE("fit_parabola vertex from 14 noisy points") {
    Rng rng(123);
    std::vector<std::pair<double, double>> points;
    for (int i = 0; i < 14; ++i) {
        const double u = 3.0 + 4.0 * static_cast<double>(i) / 13.0;
        points.emplace_back(u, (u - 5.0) * (u - 5.0) + 3.0 + 0.01 * rng.normal());
    }
    const ParabolaFit fit = fit_parabola(points);
    CHECK(std::abs(fit.vertex_u - 5.0) <= 0.05);
}

TEST_CASE("fit_parabola vertex is invariant to constant shifts in y") {
    Rng rng(5);
    std::vector<std::pair<double, double>> points, shifted;
    for (int i = 0; i < 9; ++i) {
        const double u = static_cast<double>(i);
        const double y = 0.7 * (u - 4.0) * (u - 4.0) + 1.0 + 0.05 * rng.normal();
        points.emplace_back(u, y);
        shifted.emplace_back(u, y + 11.5);
    }
    const ParabolaFit base = fit_parabola(points);
    const ParabolaFit moved = fit_parabola(shifted);
    CHECK(moved.vertex_u == doctest::Approx(base.vertex_u).epsilon(1e-9));
    CHECK(moved.vertex_y == doctest::Approx(base.vertex_y + 11.5).epsilon(1e-9));
}

TEST_CASE("fit_power_law on exact quadratic data") {
    const std::vector<std::pair<double, double>> points = {{10, 100}, {100, 10000}, {1000, 1e6}};
    const PowerLaw law = fit_power_law(points);
    CHECK(law.exponent == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(law.log_prefactor == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(law.r_squared == doctest::Approx(1.0));
    CHECK(law.exponent_ci95.first <= law.exponent);
    CHECK(law.exponent_ci95.second >= law.exponent);
}

TEST_CASE("fit_power_law rejects a single point") {
    const std::vector<std::pair<double, double>> points = {{1, 5}};
    CHECK_THROWS_WITH_AS(fit_power_law(points), doctest::Contains("n > p"), Error);
}

TEST_CASE("fit_power_law recovers an exact exponent of 0.57") {
    std::vector<std::pair<double, double>> points;
    for (const double x : {1.0, 2.5, 10.0, 55.0, 300.0, 2000.0})
        points.emplace_back(x, 3.0 * std::pow(x, 0.57));
    const PowerLaw law = fit_power_law(points);
    CHECK(std::abs(law.exponent - 0.57) <= 1e-12);
    CHECK(law.predict(10.0) == doctest::Approx(3.0 * std::pow(10.0, 0.57)).epsilon(1e-10));
    CHECK(law.invert(law.predict(123.0)) == doctest::Approx(123.0).epsilon(1e-9));
}

TEST_CASE("fit_power_law names the offending nonpositive point") {
    const std::vector<std::pair<double, double>> points = {{1, 1}, {2, 2}, {3, -1}, {4, 4}};
    CHECK_THROWS_WITH_AS(fit_power_law(points), doctest::Contains("index 2"), Error);
}

TEST_CASE("fit_power_law is scale-equivariant in x") {
    Rng rng(77);
    std::vector<std::pair<double, double>> points, scaled;
    const double s = 7.3;
    for (int i = 0; i < 8; ++i) {
        const double x = std::pow(10.0, 0.5 * i);
        const double y = 2.0 * std::pow(x, 0.4) * std::exp(0.05 * rng.normal());
        points.emplace_back(x, y);
        scaled.emplace_back(s * x, y);
    }
    const PowerLaw base = fit_power_law(points);
    const PowerLaw moved = fit_power_law(scaled);
    CHECK(std::abs(moved.exponent - base.exponent) <= 1e-12);
    CHECK(moved.log_prefactor ==
          doctest::Approx(base.log_prefactor - base.exponent * std::log(s)).epsilon(1e-9));
}
