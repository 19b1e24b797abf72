// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "scalekit/error.hpp"
#include "scalekit/flops.hpp"
#include "scalekit/numerics.hpp"
#include "scalekit/records.hpp"

namespace scalekit {

enum class Objective { min_loss, max_return };

/// Per-budget optimum read off a parabola fitted in (log10 N, metric).
/// d_opt is always recomputed from the budget and n_opt through the FLOP
/// rule, never read from the nearest record.
struct BudgetOptimum {
    double budget = 0.0;
    double n_opt = 0.0;
    double d_opt = 0.0;
    double metric_opt = 0.0;
    ParabolaFit parabola;
};

/// Raised when a budget's isoFLOP curve has no usable interior vertex
/// (wrong orientation, underdetermined, or vertex far outside the observed
/// model sizes). Carries the empirical best point as a fallback.
class NoInteriorOptimum : public Error {
public:
    NoInteriorOptimum(const std::string& what, double budget, double fallback_params,
                      double fallback_metric)
        : Error(what),
          budget_(budget),
          fallback_params_(fallback_params),
          fallback_metric_(fallback_metric) {}

    double budget() const { return budget_; }
    double fallback_params() const { return fallback_params_; }
    double fallback_metric() const { return fallback_metric_; }

private:
    double budget_;
    double fallback_params_;
    double fallback_metric_;
};

/// The three log-log regressions on FLOPs: N_opt ~ C^alpha, D_opt ~ C^beta,
/// and the optimal metric ~ C^gamma. When every d_opt comes from the same
/// linear rule, alpha + beta = 1 up to rounding.
struct IsoflopLaws {
    PowerLaw n_law;
    PowerLaw d_law;
    PowerLaw metric_law;
    std::vector<BudgetOptimum> optima;
    std::vector<std::string> warnings;
};

/// Fits a parabola to metric vs log10(params) over one budget group and
/// extracts the vertex optimum. min_loss requires an upward parabola,
/// max_return a downward one.
BudgetOptimum extract_optimum(const BudgetGroup& group, Objective objective,
                              const FlopRule& rule);

/// Runs extract_optimum per budget and fits the three power laws on the
/// surviving optima. Budgets whose extraction failed are skipped and noted
/// in warnings; fewer than 3 usable budgets is an error.
IsoflopLaws approach1_laws(std::span<const BudgetGroup> groups, Objective objective,
                           const FlopRule& rule);

/// The budget at which the fitted metric law crosses the given floor (loss)
/// or ceiling (return). Empty when no crossing occurs below 1e30 FLOPs.
std::vector<double> metric_floor_check(const IsoflopLaws& laws, double floor);

}  // namespace scalekit
