// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalekit/numerics.hpp"
#include "scalekit/records.hpp"

namespace scalekit {

enum class FitDirection { minimize, maximize };

enum class SurfaceMetric { loss, mean_return };

/// Quadratic log-metric surface
///   log m(N, D) = b0 + bN ln N + bD ln D
///              + bN2 (ln N)^2 + bND ln N ln D + bD2 (ln D)^2,
/// with the 6x6 coefficient covariance in index order
/// (b0, bN, bD, bN2, bND, bD2).
struct QuadraticSurface {
    double b0 = 0.0;
    double bN = 0.0;
    double bD = 0.0;
    double bN2 = 0.0;
    double bND = 0.0;
    double bD2 = 0.0;
    Matrix covariance{6, 6};
    FitDirection direction = FitDirection::minimize;
    int n = 0;

    /// 2*bD2 - 2*bND + 2*bN2: the curvature of the log metric along the
    /// compute constraint. Must be positive under minimize and negative
    /// under maximize for an interior optimum to exist.
    double constraint_curvature() const { return 2.0 * bD2 - 2.0 * bND + 2.0 * bN2; }

    double log_metric(double ln_n, double ln_d) const {
        return b0 + bN * ln_n + bD * ln_d + bN2 * ln_n * ln_n + bND * ln_n * ln_d +
               bD2 * ln_d * ln_d;
    }
};

/// Compute-optimal allocation implied by a surface:
///   N_opt = G (C/denom)^alpha,  D_opt = G^-1 (C/denom)^beta,
/// where alpha = (2 bD2 - bND) / curvature, beta = (2 bN2 - bND) / curvature
/// and G = exp((bD - bN) / curvature). alpha + beta = 1 by construction.
struct AllocationLaw {
    double alpha = 0.0;
    double beta = 0.0;
    double G = 0.0;
    std::pair<double, double> alpha_ci95{0.0, 0.0};
    std::pair<double, double> beta_ci95{0.0, 0.0};
    double flop_denominator = 6.0;
};

/// OLS of the quadratic form on ln(metric) over all records. Records with a
/// missing or nonpositive metric are excluded with a warning; fewer than 7
/// usable records, fewer than 3 distinct N or D values, or a rank-deficient
/// design are errors.
QuadraticSurface fit_surface(std::span<const ExperimentRecord> records, SurfaceMetric metric,
                             std::vector<std::string>* warnings = nullptr);

/// Closed-form exponents and prefactor of the allocation law. CIs are left
/// at the point estimate; use allocation_with_ci for delta-method bounds.
/// Errors when the curvature is zero or of the wrong sign for the surface's
/// objective direction.
AllocationLaw alpha_beta(const QuadraticSurface& surface, double flop_denominator = 6.0);

/// (N_opt, D_opt) at the given budget. D_opt is computed as
/// (C/denominator) / N_opt so the constraint N*D*denominator = C holds to
/// machine precision.
std::pair<double, double> optimal_allocation(const QuadraticSurface& surface, double budget,
                                             double flop_denominator);

struct ConstrainedSearchResult {
    double n_opt = 0.0;
    double d_opt = 0.0;
    bool at_boundary = false;
};

/// Brute-force oracle for optimal_allocation: optimizes the surface's log
/// metric over u = ln N on a uniform grid along the constraint
/// ln D = ln(C/denominator) - u, spanning +-10 natural-log units around the
/// closed-form answer (or the symmetric split when the closed form fails),
/// then refines by golden-section search to 1e-6 in u. If the optimum sits
/// on the search edge the result is flagged instead of refined.
ConstrainedSearchResult constrained_search(const QuadraticSurface& surface, double budget,
                                           double flop_denominator, int grid = 4096);

enum class AllocationExponent { alpha, beta };

/// Delta-method 95% CI for alpha or beta: the analytic gradient of the
/// exponent formula in the six coefficients, propagated through the OLS
/// coefficient covariance; interval = h +- 1.96 * SE.
std::pair<double, double> delta_ci(const QuadraticSurface& surface, AllocationExponent which);

/// alpha_beta with both delta-method CIs filled in.
AllocationLaw allocation_with_ci(const QuadraticSurface& surface, double flop_denominator = 6.0);

}  // namespace scalekit
