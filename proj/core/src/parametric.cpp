// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/parametric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "scalekit/error.hpp"

namespace scalekit {

namespace {

double surface_metric_value(const ExperimentRecord& rec, SurfaceMetric metric) {
    if (metric == SurfaceMetric::loss) return rec.loss ? *rec.loss : -1.0;
    return rec.mean_return ? *rec.mean_return : -1.0;
}

void check_curvature(const QuadraticSurface& surface) {
    const double curvature = surface.constraint_curvature();
    const bool ok = surface.direction == FitDirection::minimize ? curvature > 0.0
                                                                : curvature < 0.0;
    if (curvature == 0.0 || !ok)
        throw Error("surface admits no interior optimum along constraint (curvature " +
                    std::to_string(curvature) + ")");
}

// Gradient of alpha = (2*bD2 - bND) / s, s = 2*bD2 - 2*bND + 2*bN2, in the
// coefficient order (b0, bN, bD, bN2, bND, bD2). alpha does not depend on
// b0, bN, bD, so those entries are zero.
std::array<double, 6> alpha_gradient(const QuadraticSurface& surface) {
    const double s = surface.constraint_curvature();
    const double num = 2.0 * surface.bD2 - surface.bND;
    std::array<double, 6> grad{};
    grad[3] = -2.0 * num / (s * s);              // d/d bN2
    grad[4] = (-s + 2.0 * num) / (s * s);        // d/d bND
    grad[5] = (2.0 * s - 2.0 * num) / (s * s);   // d/d bD2
    return grad;
}

double golden_section(const QuadraticSurface& surface, double ln_cd, double sign, double lo,
                      double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = sign * surface.log_metric(c, ln_cd - c);
    double fd = sign * surface.log_metric(d, ln_cd - d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = sign * surface.log_metric(c, ln_cd - c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = sign * surface.log_metric(d, ln_cd - d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

QuadraticSurface fit_surface(std::span<const ExperimentRecord> records, SurfaceMetric metric,
                             std::vector<std::string>* warnings) {
    std::vector<const ExperimentRecord*> usable;
    usable.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double value = surface_metric_value(records[i], metric);
        if (value > 0.0) {
            usable.push_back(&records[i]);
        } else if (warnings) {
            char buf[120];
            std::snprintf(buf, sizeof(buf),
                          "record %zu excluded from surface fit: metric missing or nonpositive",
                          i);
            warnings->emplace_back(buf);
        }
    }
    if (usable.size() < 7)
        throw Error("fit_surface: need >= 7 records with a positive metric, got " +
                    std::to_string(usable.size()));

    std::set<std::int64_t> distinct_n;
    std::set<double> distinct_d;
    for (const auto* rec : usable) {
        distinct_n.insert(rec->params);
        distinct_d.insert(rec->samples);
    }
    if (distinct_n.size() < 3) throw Error("fit_surface: need >= 3 distinct param values");
    if (distinct_d.size() < 3) throw Error("fit_surface: need >= 3 distinct sample values");

    Matrix design(usable.size(), 6);
    std::vector<double> targets(usable.size());
    for (std::size_t i = 0; i < usable.size(); ++i) {
        const double ln_n = std::log(static_cast<double>(usable[i]->params));
        const double ln_d = std::log(usable[i]->samples);
        design(i, 0) = 1.0;
        design(i, 1) = ln_n;
        design(i, 2) = ln_d;
        design(i, 3) = ln_n * ln_n;
        design(i, 4) = ln_n * ln_d;
        design(i, 5) = ln_d * ln_d;
        targets[i] = std::log(surface_metric_value(*usable[i], metric));
    }
    const OlsFit fit = ols(design, targets);

    QuadraticSurface surface;
    surface.b0 = fit.coeffs[0];
    surface.bN = fit.coeffs[1];
    surface.bD = fit.coeffs[2];
    surface.bN2 = fit.coeffs[3];
    surface.bND = fit.coeffs[4];
    surface.bD2 = fit.coeffs[5];
    surface.covariance = fit.covariance;
    surface.direction =
        metric == SurfaceMetric::loss ? FitDirection::minimize : FitDirection::maximize;
    surface.n = fit.n;
    return surface;
}

AllocationLaw alpha_beta(const QuadraticSurface& surface, double flop_denominator) {
    check_curvature(surface);
    const double s = surface.constraint_curvature();

    AllocationLaw law;
    law.alpha = (2.0 * surface.bD2 - surface.bND) / s;
    law.beta = (2.0 * surface.bN2 - surface.bND) / s;
    law.G = std::exp((surface.bD - surface.bN) / s);
    law.alpha_ci95 = {law.alpha, law.alpha};
    law.beta_ci95 = {law.beta, law.beta};
    law.flop_denominator = flop_denominator;
    return law;
}

std::pair<double, double> optimal_allocation(const QuadraticSurface& surface, double budget,
                                             double flop_denominator) {
    if (!(budget > 0.0)) throw Error("optimal_allocation: budget must be > 0");
    const AllocationLaw law = alpha_beta(surface, flop_denominator);
    const double reduced = budget / flop_denominator;  // C / denom = N * D
    const double n_opt = law.G * std::pow(reduced, law.alpha);
    const double d_opt = reduced / n_opt;
    return {n_opt, d_opt};
}

ConstrainedSearchResult constrained_search(const QuadraticSurface& surface, double budget,
                                           double flop_denominator, int grid) {
    if (grid < 1000) throw Error("constrained_search: grid must be >= 1000");
    if (!(budget > 0.0)) throw Error("constrained_search: budget must be > 0");

    const double ln_cd = std::log(budget / flop_denominator);
    double center;
    try {
        const AllocationLaw law = alpha_beta(surface, flop_denominator);
        center = std::log(law.G) + law.alpha * ln_cd;
    } catch (const Error&) {
        center = 0.5 * ln_cd;  // symmetric split when no closed form exists
    }

    const double sign = surface.direction == FitDirection::minimize ? 1.0 : -1.0;
    const double lo = center - 10.0, hi = center + 10.0;
    const double step = (hi - lo) / static_cast<double>(grid);

    int best_idx = 0;
    double best_val = sign * surface.log_metric(lo, ln_cd - lo);
    for (int i = 1; i <= grid; ++i) {
        const double u = lo + step * static_cast<double>(i);
        const double val = sign * surface.log_metric(u, ln_cd - u);
        if (val < best_val) {
            best_val = val;
            best_idx = i;
        }
    }

    ConstrainedSearchResult result;
    double u_opt;
    if (best_idx == 0 || best_idx == grid) {
        result.at_boundary = true;
        u_opt = lo + step * static_cast<double>(best_idx);
    } else {
        const double bracket_lo = lo + step * static_cast<double>(best_idx - 1);
        const double bracket_hi = lo + step * static_cast<double>(best_idx + 1);
        u_opt = golden_section(surface, ln_cd, sign, bracket_lo, bracket_hi, 1e-6);
    }
    result.n_opt = std::exp(u_opt);
    result.d_opt = std::exp(ln_cd - u_opt);
    return result;
}

std::pair<double, double> delta_ci(const QuadraticSurface& surface, AllocationExponent which) {
    check_curvature(surface);
    if (surface.covariance.rows() != 6 || surface.covariance.cols() != 6)
        throw Error("delta_ci: surface covariance must be 6x6");

    std::array<double, 6> grad = alpha_gradient(surface);
    if (which == AllocationExponent::beta)
        for (double& g : grad) g = -g;  // beta = 1 - alpha

    double variance = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) variance += grad[i] * surface.covariance(i, j) * grad[j];
    if (!(variance >= 0.0) || !std::isfinite(variance))
        throw Error("delta_ci: covariance is not positive semidefinite");

    const double se = std::sqrt(variance);
    const AllocationLaw law = alpha_beta(surface);
    const double h = which == AllocationExponent::alpha ? law.alpha : law.beta;
    return {h - 1.96 * se, h + 1.96 * se};
}

AllocationLaw allocation_with_ci(const QuadraticSurface& surface, double flop_denominator) {
    AllocationLaw law = alpha_beta(surface, flop_denominator);
    law.alpha_ci95 = delta_ci(surface, AllocationExponent::alpha);
    law.beta_ci95 = delta_ci(surface, AllocationExponent::beta);
    return law;
}

}  // namespace scalekit
