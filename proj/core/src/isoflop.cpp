// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/isoflop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace scalekit {

namespace {

double metric_of(const ExperimentRecord& rec, Objective objective) {
    if (objective == Objective::min_loss) {
        if (!rec.loss) throw Error("extract_optimum: record lacks loss");
        return *rec.loss;
    }
    if (!rec.mean_return) throw Error("extract_optimum: record lacks mean_return");
    return *rec.mean_return;
}

// Empirical arg-best record of the group, used as the fallback carried by
// NoInteriorOptimum.
std::pair<double, double> arg_best(const BudgetGroup& group, Objective objective) {
    const ExperimentRecord* best = &group.records.front();
    double best_metric = metric_of(*best, objective);
    for (const auto& rec : group.records) {
        const double m = metric_of(rec, objective);
        const bool better = objective == Objective::min_loss ? m < best_metric : m > best_metric;
        if (better) {
            best = &rec;
            best_metric = m;
        }
    }
    return {static_cast<double>(best->params), best_metric};
}

[[noreturn]] void fail_no_optimum(const BudgetGroup& group, Objective objective,
                                  const std::string& why) {
    const auto [params, metric] = arg_best(group, objective);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "no interior optimum at budget %.6g (%s)", group.budget,
                  why.c_str());
    throw NoInteriorOptimum(buf, group.budget, params, metric);
}

}  // namespace

BudgetOptimum extract_optimum(const BudgetGroup& group, Objective objective,
                              const FlopRule& rule) {
    if (group.records.empty()) throw Error("extract_optimum: empty group");

    std::set<std::int64_t> distinct;
    for (const auto& rec : group.records) distinct.insert(rec.params);
    if (distinct.size() < 3) fail_no_optimum(group, objective, "fewer than 3 distinct model sizes");

    std::vector<std::pair<double, double>> points;
    points.reserve(group.records.size());
    for (const auto& rec : group.records)
        points.emplace_back(std::log10(static_cast<double>(rec.params)),
                            metric_of(rec, objective));

    ParabolaFit parabola;
    try {
        parabola = fit_parabola(points);
    } catch (const Error& e) {
        fail_no_optimum(group, objective, e.what());
    }

    const bool want_min = objective == Objective::min_loss;
    if (want_min != parabola.opens_upward())
        fail_no_optimum(group, objective,
                        want_min ? "parabola opens downward under min_loss"
                                 : "parabola opens upward under max_return");

    const double n_opt = std::pow(10.0, parabola.vertex_u);
    const auto [min_it, max_it] =
        std::minmax_element(group.records.begin(), group.records.end(),
                            [](const auto& a, const auto& b) { return a.params < b.params; });
    const double n_lo = static_cast<double>(min_it->params) / 10.0;
    const double n_hi = static_cast<double>(max_it->params) * 10.0;
    if (n_opt < n_lo || n_opt > n_hi)
        fail_no_optimum(group, objective, "vertex outside observed model-size range x10");

    BudgetOptimum optimum;
    optimum.budget = group.budget;
    optimum.n_opt = n_opt;
    optimum.d_opt = samples_for_budget(rule, group.budget, n_opt);
    optimum.metric_opt = parabola.vertex_y;
    optimum.parabola = parabola;
    return optimum;
}

IsoflopLaws approach1_laws(std::span<const BudgetGroup> groups, Objective objective,
                           const FlopRule& rule) {
    IsoflopLaws laws;
    for (const auto& group : groups) {
        try {
            laws.optima.push_back(extract_optimum(group, objective, rule));
        } catch (const NoInteriorOptimum& e) {
            char buf[200];
            std::snprintf(buf, sizeof(buf),
                          "budget %.6g skipped: %s; empirical best params=%.6g metric=%.6g",
                          e.budget(), e.what(), e.fallback_params(), e.fallback_metric());
            laws.warnings.emplace_back(buf);
        }
    }
    if (laws.optima.size() < 3)
        throw Error("approach1_laws: insufficient budgets, only " +
                    std::to_string(laws.optima.size()) + " yielded optima (need >= 3)");

    std::vector<std::pair<double, double>> n_points, d_points, metric_points;
    for (const auto& opt : laws.optima) {
        n_points.emplace_back(opt.budget, opt.n_opt);
        d_points.emplace_back(opt.budget, opt.d_opt);
        if (opt.metric_opt > 0.0) {
            metric_points.emplace_back(opt.budget, opt.metric_opt);
        } else {
            char buf[120];
            std::snprintf(buf, sizeof(buf),
                          "budget %.6g excluded from metric law: nonpositive optimum %.6g",
                          opt.budget, opt.metric_opt);
            laws.warnings.emplace_back(buf);
        }
    }
    laws.n_law = fit_power_law(n_points);
    laws.d_law = fit_power_law(d_points);
    if (metric_points.size() < 3)
        throw Error("approach1_laws: insufficient budgets with positive optimal metric");
    laws.metric_law = fit_power_law(metric_points);
    return laws;
}

std::vector<double> metric_floor_check(const IsoflopLaws& laws, double floor) {
    constexpr double kBudgetCap = 1e30;
    if (!(floor > 0.0)) throw Error("metric_floor_check: floor must be > 0 for a log-space law");
    if (laws.metric_law.exponent == 0.0) return {};
    const double crossing = laws.metric_law.invert(floor);
    if (!std::isfinite(crossing) || crossing > kBudgetCap) return {};
    return {crossing};
}

}  // namespace scalekit
