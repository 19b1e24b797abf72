// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/crossval.hpp"

#include <cmath>

#include "scalekit/error.hpp"
#include "scalekit/numerics.hpp"

namespace scalekit {

CvReport rolling_cv(std::span<const std::pair<double, double>> points, int min_train,
                    std::string name) {
    if (min_train < 3) throw Error("rolling_cv: min_train must be >= 3");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw Error("rolling_cv: points must be sorted strictly ascending in x");
    if (points.size() < static_cast<std::size_t>(min_train) + 1)
        throw Error("rolling_cv: need at least min_train + 1 = " + std::to_string(min_train + 1) +
                    " points, got " + std::to_string(points.size()));

    CvReport report;
    report.regression_name = std::move(name);
    double rmse_sum = 0.0;
    int rmse_count = 0;

    for (std::size_t k = static_cast<std::size_t>(min_train); k < points.size(); ++k) {
        CvStep step;
        step.train_size = static_cast<int>(k);
        step.eval_x = points[k].first;
        step.actual = points[k].second;
        try {
            const PowerLaw law = fit_power_law(points.subspan(0, k));
            step.b0 = law.log_prefactor;
            step.b1 = law.exponent;
            step.predicted = law.predict(step.eval_x);
            step.rmse = std::abs(step.predicted - step.actual);
            rmse_sum += step.rmse;
            ++rmse_count;
        } catch (const Error&) {
            step.fit_failed = true;
        }
        report.steps.push_back(step);
    }
    report.mean_rmse = rmse_count > 0 ? rmse_sum / static_cast<double>(rmse_count) : 0.0;
    return report;
}

std::vector<CvReport> cv_all(std::span<const NamedSeries> series, int min_train) {
    std::vector<CvReport> reports;
    reports.reserve(series.size());
    for (const auto& s : series) {
        try {
            reports.push_back(rolling_cv(s.points, min_train, s.name));
        } catch (const Error& e) {
            CvReport failed;
            failed.regression_name = s.name;
            failed.error = e.what();
            reports.push_back(std::move(failed));
        }
    }
    return reports;
}

}  // namespace scalekit
