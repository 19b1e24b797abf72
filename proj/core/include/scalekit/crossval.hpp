// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scalekit {

/// One expanding-window step: fit on the first train_size points, predict
/// the next one. rmse is the single-point absolute error in the target's
/// linear (untransformed) space.
struct CvStep {
    int train_size = 0;
    double eval_x = 0.0;
    double predicted = 0.0;
    double actual = 0.0;
    double rmse = 0.0;
    double b0 = 0.0;  // fitted log prefactor at this window
    double b1 = 0.0;  // fitted exponent at this window
    bool fit_failed = false;
};

struct CvReport {
    std::string regression_name;
    std::vector<CvStep> steps;
    double mean_rmse = 0.0;
    std::string error;  // nonempty when the whole series could not be cross-validated

    bool ok() const { return error.empty(); }
};

/// Rolling time-series cross-validation of a power-law regression: fit on
/// points[0..k), evaluate on points[k], for k = min_train .. len-1. Points
/// must be sorted strictly ascending in x so evaluation always happens on a
/// future budget. Failed window fits are recorded and excluded from the
/// mean.
CvReport rolling_cv(std::span<const std::pair<double, double>> points, int min_train = 6,
                    std::string name = {});

struct NamedSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// rolling_cv over a collection of named regressions. Per-series errors are
/// captured in that series' report and do not affect siblings.
std::vector<CvReport> cv_all(std::span<const NamedSeries> series, int min_train = 6);

}  // namespace scalekit
