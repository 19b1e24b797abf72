// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace scalekit {

namespace {

constexpr double kMinExponent = 1e-12;

// Annotates a forecast whose budget falls outside the fitted budget range.
void annotate_range(Forecast& forecast, std::span<const BudgetOptimum> optima) {
    if (optima.empty()) return;
    double lo = optima.front().budget, hi = optima.front().budget;
    for (const auto& opt : optima) {
        lo = std::min(lo, opt.budget);
        hi = std::max(hi, opt.budget);
    }
    if (forecast.budget_c > hi) {
        const double decades = std::log10(forecast.budget_c / hi);
        char buf[120];
        std::snprintf(buf, sizeof(buf),
                      "extrapolation: %.2f decades beyond largest fitted budget %.6g", decades,
                      hi);
        forecast.warnings.emplace_back(buf);
    } else if (forecast.budget_c < lo) {
        forecast.warnings.emplace_back("budget below smallest fitted budget (interpolating downward)");
    }
}

}  // namespace

double ReturnLossLaw::predict_return(double loss) const {
    return std::exp(log_prefactor + delta * std::log(loss));
}

double ReturnLossLaw::loss_for_return(double target_return) const {
    if (std::abs(delta) < kMinExponent)
        throw Error("return-loss law has a near-zero exponent and cannot be inverted");
    return std::exp((std::log(target_return) - log_prefactor) / delta);
}

ReturnLossLaw fit_return_loss(std::span<const BudgetOptimum> loss_optima,
                              std::span<const BudgetOptimum> return_optima,
                              std::vector<std::string>* warnings) {
    std::vector<std::pair<double, double>> points;  // (L_opt, R_opt)
    for (const auto& loss_opt : loss_optima) {
        for (const auto& ret_opt : return_optima) {
            if (std::abs(loss_opt.budget - ret_opt.budget) / loss_opt.budget <= 1e-6) {
                if (loss_opt.metric_opt > 0.0 && ret_opt.metric_opt > 0.0) {
                    points.emplace_back(loss_opt.metric_opt, ret_opt.metric_opt);
                } else if (warnings) {
                    char buf[120];
                    std::snprintf(buf, sizeof(buf),
                                  "budget %.6g excluded from return-loss fit: nonpositive optimum",
                                  loss_opt.budget);
                    warnings->emplace_back(buf);
                }
                break;
            }
        }
    }
    if (points.size() < 3)
        throw Error("fit_return_loss: only " + std::to_string(points.size()) +
                    " budgets matched between loss and return optima (need >= 3)");

    const PowerLaw law = fit_power_law(points);
    ReturnLossLaw result;
    result.delta = law.exponent;
    result.log_prefactor = law.log_prefactor;
    result.r_squared = law.r_squared;
    result.n = law.n;
    if (result.delta >= 0.0 && warnings)
        warnings->emplace_back("return-loss exponent is nonnegative; return does not improve as loss falls");
    return result;
}

std::string to_string(ForecastMethod method) {
    return method == ForecastMethod::isoflop_chain ? "isoflop_chain" : "parametric";
}

Forecast forecast_isoflop_chain(double target_return, const ReturnLossLaw& return_loss,
                                const IsoflopLaws& loss_laws) {
    if (!(target_return > 0.0)) throw Error("forecast: target return must be > 0");

    Forecast forecast;
    forecast.method = ForecastMethod::isoflop_chain;
    forecast.target_metric = target_return;
    forecast.implied_loss = return_loss.loss_for_return(target_return);

    if (std::abs(loss_laws.metric_law.exponent) < kMinExponent)
        throw Error("forecast: loss law has a near-zero exponent and cannot be inverted");
    forecast.budget_c = loss_laws.metric_law.invert(*forecast.implied_loss);
    forecast.n_opt = loss_laws.n_law.predict(forecast.budget_c);
    forecast.d_opt = loss_laws.d_law.predict(forecast.budget_c);
    annotate_range(forecast, loss_laws.optima);
    return forecast;
}

Forecast forecast_from_loss(double target_loss, const IsoflopLaws& loss_laws) {
    if (!(target_loss > 0.0)) throw Error("forecast: target loss must be > 0");
    if (std::abs(loss_laws.metric_law.exponent) < kMinExponent)
        throw Error("forecast: loss law has a near-zero exponent and cannot be inverted");

    Forecast forecast;
    forecast.method = ForecastMethod::isoflop_chain;
    forecast.target_metric = target_loss;
    forecast.implied_loss = target_loss;
    forecast.budget_c = loss_laws.metric_law.invert(target_loss);
    forecast.n_opt = loss_laws.n_law.predict(forecast.budget_c);
    forecast.d_opt = loss_laws.d_law.predict(forecast.budget_c);
    annotate_range(forecast, loss_laws.optima);
    return forecast;
}

Forecast forecast_parametric(double budget, const QuadraticSurface& surface,
                             double flop_denominator) {
    const AllocationLaw law = alpha_beta(surface, flop_denominator);
    const auto [n_opt, d_opt] = optimal_allocation(surface, budget, flop_denominator);

    Forecast forecast;
    forecast.method = ForecastMethod::parametric;
    forecast.budget_c = budget;
    forecast.n_opt = n_opt;
    forecast.d_opt = d_opt;
    forecast.target_metric = std::exp(surface.log_metric(std::log(n_opt), std::log(d_opt)));
    forecast.alpha = law.alpha;
    forecast.beta = law.beta;
    return forecast;
}

Forecast forecast_from_return_law(double target_return, const IsoflopLaws& return_laws) {
    if (!(target_return > 0.0)) throw Error("forecast: target return must be > 0");
    if (return_laws.metric_law.exponent <= 0.0)
        throw Error("forecast: return law not increasing (exponent " +
                    std::to_string(return_laws.metric_law.exponent) + ")");

    Forecast forecast;
    forecast.method = ForecastMethod::isoflop_chain;
    forecast.target_metric = target_return;
    forecast.budget_c = return_laws.metric_law.invert(target_return);
    forecast.n_opt = return_laws.n_law.predict(forecast.budget_c);
    forecast.d_opt = return_laws.d_law.predict(forecast.budget_c);
    annotate_range(forecast, return_laws.optima);
    return forecast;
}

}  // namespace scalekit
