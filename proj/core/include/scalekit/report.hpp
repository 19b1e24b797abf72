// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalekit/crossval.hpp"
#include "scalekit/forecast.hpp"
#include "scalekit/isoflop.hpp"
#include "scalekit/parametric.hpp"

namespace scalekit {

/// Everything a fit run produced, serializable to a single JSON report that
/// the forecast and report commands consume.
struct FitReport {
    std::string metric;  // "loss" or "return"
    std::string rule;    // "6nd" or "8nd"
    double flop_denominator = 6.0;
    std::optional<IsoflopLaws> isoflop;
    std::optional<QuadraticSurface> surface;
    std::optional<AllocationLaw> allocation;
    std::optional<ReturnLossLaw> return_loss;
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
    std::string config_digest;

    std::string to_json() const;
    static FitReport from_json(const std::string& text);
};

/// Forecasts serialized with the fields method, target, implied_loss,
/// flops, params, samples, warnings.
std::string forecasts_to_json(std::span<const Forecast> forecasts,
                              const std::string& config_digest);

/// CV reports as JSON: per-regression steps, mean RMSE, and any error.
std::string cv_reports_to_json(std::span<const CvReport> reports,
                               const std::string& config_digest);

// ---------------------------------------------------------------------------
// CSV emitters (plot data)
// ---------------------------------------------------------------------------

/// Optima table: budget, n_opt, d_opt, metric_opt.
std::string optima_csv(std::span<const BudgetOptimum> optima);

/// Observed vs fitted law line: flops, observed, fitted.
std::string law_csv(std::span<const BudgetOptimum> optima, const PowerLaw& law,
                    const std::string& observed_column);

/// Coefficient trajectories: regression_name, train_size, b0, b1,
/// predicted, actual, abs_error.
std::string cv_trajectory_csv(std::span<const CvReport> reports);

/// FNV-1a 64-bit digest, hex-encoded; used to tie outputs to the manifest
/// that produced them.
std::string content_digest(const std::string& content);

}  // namespace scalekit
