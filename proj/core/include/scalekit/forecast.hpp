// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalekit/isoflop.hpp"
#include "scalekit/parametric.hpp"

namespace scalekit {

/// R_opt = exp(log_prefactor) * L_opt^delta, fitted over budgets where both
/// a loss optimum and a return optimum exist. delta is expected negative
/// (return improves as loss falls).
struct ReturnLossLaw {
    double delta = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
    int n = 0;

    double predict_return(double loss) const;
    /// Loss needed for the target return; requires a nonzero delta.
    double loss_for_return(double target_return) const;
};

/// Regresses log optimal return on log optimal loss over matched budgets.
/// Needs at least 3 budgets common to both optima lists.
ReturnLossLaw fit_return_loss(std::span<const BudgetOptimum> loss_optima,
                              std::span<const BudgetOptimum> return_optima,
                              std::vector<std::string>* warnings = nullptr);

enum class ForecastMethod { isoflop_chain, parametric };

std::string to_string(ForecastMethod method);

/// A compute forecast: the budget needed for a target metric and the
/// compute-optimal (N, D) at that budget, with the method that produced it.
struct Forecast {
    ForecastMethod method = ForecastMethod::isoflop_chain;
    double target_metric = 0.0;
    std::optional<double> implied_loss;
    double budget_c = 0.0;
    double n_opt = 0.0;
    double d_opt = 0.0;
    std::vector<std::string> warnings;
    // Allocation provenance, set by the parametric method.
    std::optional<double> alpha;
    std::optional<double> beta;
};

/// Chains target return -> implied loss (return-loss law) -> budget (loss
/// law) -> (N, D) (the two isoFLOP laws). Budgets outside the fitted range
/// are annotated with an extrapolation or interpolation warning.
Forecast forecast_isoflop_chain(double target_return, const ReturnLossLaw& return_loss,
                                const IsoflopLaws& loss_laws);

/// Same chain entered one step later, from a target loss.
Forecast forecast_from_loss(double target_loss, const IsoflopLaws& loss_laws);

/// Closed-form allocation at a fixed budget via the fitted surface. The
/// reported target metric is the surface's prediction at the optimum.
Forecast forecast_parametric(double budget, const QuadraticSurface& surface,
                             double flop_denominator);

/// Inverts a return-vs-FLOPs law directly (the RL-style chain): budget from
/// the metric law, (N, D) from the return-optimal laws.
Forecast forecast_from_return_law(double target_return, const IsoflopLaws& return_laws);

}  // namespace scalekit
