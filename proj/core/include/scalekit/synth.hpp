// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalekit/parametric.hpp"
#include "scalekit/records.hpp"

namespace scalekit {

/// Ground-truth generator spec: a known quadratic loss surface sampled on a
/// budget x model grid with lognormal noise, plus a power-law link from
/// loss to return. The surface covariance is ignored (truth has none).
struct SynthSpec {
    QuadraticSurface surface;  // direction minimize; loss surface
    double return_delta = -1.0;
    double return_prefactor = 1.0;
    std::vector<double> budgets;     // ascending C values
    std::vector<double> model_grid;  // ascending N values
    double noise_sigma = 0.0;        // sigma of the Gaussian noise in log space
    std::uint64_t seed = 0;
    double flop_denominator = 6.0;
    std::string domain = "synthetic";

    void validate() const;
};

/// Samples one record per (budget, model size): D = C / (denominator * N),
/// loss = exp(surface(ln N, ln D) + eps) with eps ~ Normal(0, sigma^2),
/// mean_return = prefactor * loss^delta * exp(eps'). Records carry setting
/// bc_loss with both metrics attached. Fully deterministic given the seed
/// (mt19937_64 stream, Box-Muller normals, budgets outer / models inner,
/// loss draw before return draw).
std::vector<ExperimentRecord> generate(const SynthSpec& spec);

struct BudgetTruth {
    double budget = 0.0;
    double n_opt = 0.0;
    double d_opt = 0.0;
    double loss_opt = 0.0;
    double return_opt = 0.0;
};

/// Closed-form truths for everything the pipeline estimates.
struct SynthTruth {
    double alpha = 0.0;
    double beta = 0.0;
    double G = 0.0;
    double gamma_loss = 0.0;    // log-log slope of loss_opt over the budget list
    double gamma_return = 0.0;  // log-log slope of return_opt over the budget list
    double return_delta = 0.0;
    std::vector<BudgetTruth> per_budget;
};

/// Evaluates the ground-truth surface along its own optimal allocation at
/// every budget. The gamma exponents are the exact log-log slopes fitted
/// over the budget list (the optimal-metric path is only asymptotically a
/// pure power law).
SynthTruth analytic_optima(const SynthSpec& spec);

}  // namespace scalekit
