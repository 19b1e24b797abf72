// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "scalekit/rng.hpp"
#include "scalekit/synth.hpp"

namespace scalekit::test {

// Canonical ground-truth spec used across the suites: a shallow symmetric
// surface (alpha = 0.5, gamma_loss = -0.3) whose optimal-loss path is an
// exact power law, sampled on 6 half-decade budgets with a model grid
// centered on the optimal-size path.
inline SynthSpec canonical_spec(std::uint64_t seed = 42, double sigma = 0.0, int budgets = 6,
                                int models = 9) {
    SynthSpec spec;
    spec.surface.b0 = 9.0;
    spec.surface.bN = -0.30;
    spec.surface.bD = -0.30;
    spec.surface.bN2 = 0.005;
    spec.surface.bND = -0.01;
    spec.surface.bD2 = 0.005;
    spec.surface.direction = FitDirection::minimize;
    spec.return_delta = -0.8;
    spec.return_prefactor = 1.0;
    spec.noise_sigma = sigma;
    spec.seed = seed;
    spec.flop_denominator = 6.0;

    for (int i = 0; i < budgets; ++i) spec.budgets.push_back(1e13 * std::pow(10.0, 0.5 * i));

    // Model grid symmetric (in log) around the optimal-size path, with a
    // margin of one path-half-width on each side.
    const AllocationLaw law = alpha_beta(spec.surface, spec.flop_denominator);
    const double n_first = law.G * std::pow(spec.budgets.front() / 6.0, law.alpha);
    const double n_last = law.G * std::pow(spec.budgets.back() / 6.0, law.alpha);
    const double center = 0.5 * (std::log10(n_first) + std::log10(n_last));
    const double half = std::log10(n_last / n_first);  // path half-width x 2 margin
    for (int i = 0; i < models; ++i) {
        const double exponent =
            center - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(models - 1);
        spec.model_grid.push_back(std::round(std::pow(10.0, exponent)));
    }
    return spec;
}

// Asymmetric variant (alpha = 0.475, G = e) for tests that should not rely
// on the symmetric special case.
inline SynthSpec skewed_spec(std::uint64_t seed = 7, double sigma = 0.0) {
    SynthSpec spec = canonical_spec(seed, sigma);
    spec.surface.bN = -0.32;
    spec.surface.bD = -0.28;
    spec.surface.bN2 = 0.0055;
    spec.surface.bND = -0.01;
    spec.surface.bD2 = 0.0045;
    spec.model_grid.clear();
    const AllocationLaw law = alpha_beta(spec.surface, spec.flop_denominator);
    const double n_first = law.G * std::pow(spec.budgets.front() / 6.0, law.alpha);
    const double n_last = law.G * std::pow(spec.budgets.back() / 6.0, law.alpha);
    const double center = 0.5 * (std::log10(n_first) + std::log10(n_last));
    const double half = std::log10(n_last / n_first);
    for (int i = 0; i < 9; ++i) {
        const double exponent = center - half + 2.0 * half * static_cast<double>(i) / 8.0;
        spec.model_grid.push_back(std::round(std::pow(10.0, exponent)));
    }
    return spec;
}

// Random surface with an interior minimum and a bounded allocation law,
// for closed-form vs brute-force oracle checks.
inline QuadraticSurface random_valid_surface(Rng& rng) {
    for (;;) {
        QuadraticSurface surface;
        surface.b0 = -1.0 + 4.0 * rng.uniform();
        surface.bN = -0.6 + 0.7 * rng.uniform();
        surface.bD = -0.6 + 0.7 * rng.uniform();
        surface.bN2 = 0.05 + 0.45 * rng.uniform();
        surface.bD2 = 0.05 + 0.45 * rng.uniform();
        surface.bND = -0.3 + 0.6 * rng.uniform();
        surface.direction = FitDirection::minimize;
        const double curvature = surface.constraint_curvature();
        if (curvature < 1e-3) continue;
        const double alpha = (2.0 * surface.bD2 - surface.bND) / curvature;
        const double log_g = (surface.bD - surface.bN) / curvature;
        if (alpha < 0.05 || alpha > 0.95 || std::abs(log_g) > 20.0) continue;
        return surface;
    }
}

inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t pos = 0; pos < idx.size(); ++pos) r[idx[pos]] = static_cast<double>(pos);
        return r;
    };
    const std::vector<double> rx = ranks(xs), ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace scalekit::test
