// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/synth.hpp"

#include <cmath>

#include "scalekit/error.hpp"
#include "scalekit/rng.hpp"

namespace scalekit {

namespace {

void check_ascending_positive(const std::vector<double>& values, const char* name) {
    if (values.empty()) throw Error(std::string("synth spec: ") + name + " must be non-empty");
    double prev = 0.0;
    for (const double v : values) {
        if (!(v > 0.0)) throw Error(std::string("synth spec: ") + name + " must be positive");
        if (!(v > prev)) throw Error(std::string("synth spec: ") + name + " must be strictly ascending");
        prev = v;
    }
}

}  // namespace

void SynthSpec::validate() const {
    check_ascending_positive(budgets, "budgets");
    check_ascending_positive(model_grid, "model_grid");
    if (!(noise_sigma >= 0.0)) throw Error("synth spec: noise_sigma must be >= 0");
    if (!(flop_denominator > 0.0)) throw Error("synth spec: flop_denominator must be > 0");
    if (std::abs(surface.constraint_curvature()) < 1e-6)
        throw Error("synth spec: surface curvature below 1e-6, no usable interior optimum");
    if (!(return_prefactor > 0.0)) throw Error("synth spec: return_prefactor must be > 0");
    for (const double n : model_grid)
        if (n != std::floor(n) || n < 1.0)
            throw Error("synth spec: model_grid entries must be integers >= 1");
}

std::vector<ExperimentRecord> generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    std::vector<ExperimentRecord> records;
    records.reserve(spec.budgets.size() * spec.model_grid.size());
    for (const double budget : spec.budgets) {
        for (const double n : spec.model_grid) {
            const double d = budget / (spec.flop_denominator * n);
            const double eps_loss = spec.noise_sigma * rng.normal();
            const double eps_ret = spec.noise_sigma * rng.normal();
            const double loss =
                std::exp(spec.surface.log_metric(std::log(n), std::log(d)) + eps_loss);
            const double mean_return =
                spec.return_prefactor * std::pow(loss, spec.return_delta) * std::exp(eps_ret);

            ExperimentRecord rec;
            rec.domain = spec.domain;
            rec.setting = Setting::bc_loss;
            rec.flops = budget;
            rec.params = static_cast<std::int64_t>(n);
            rec.samples = d;
            rec.loss = loss;
            rec.mean_return = mean_return;
            rec.seed = static_cast<std::int64_t>(spec.seed);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

SynthTruth analytic_optima(const SynthSpec& spec) {
    spec.validate();
    const AllocationLaw law = alpha_beta(spec.surface, spec.flop_denominator);

    SynthTruth truth;
    truth.alpha = law.alpha;
    truth.beta = law.beta;
    truth.G = law.G;
    truth.return_delta = spec.return_delta;

    std::vector<std::pair<double, double>> loss_points, return_points;
    for (const double budget : spec.budgets) {
        const auto [n_opt, d_opt] = optimal_allocation(spec.surface, budget, spec.flop_denominator);
        BudgetTruth bt;
        bt.budget = budget;
        bt.n_opt = n_opt;
        bt.d_opt = d_opt;
        bt.loss_opt = std::exp(spec.surface.log_metric(std::log(n_opt), std::log(d_opt)));
        bt.return_opt = spec.return_prefactor * std::pow(bt.loss_opt, spec.return_delta);
        loss_points.emplace_back(budget, bt.loss_opt);
        return_points.emplace_back(budget, bt.return_opt);
        truth.per_budget.push_back(bt);
    }
    truth.gamma_loss = fit_power_law(loss_points).exponent;
    truth.gamma_return = fit_power_law(return_points).exponent;
    return truth;
}

}  // namespace scalekit
