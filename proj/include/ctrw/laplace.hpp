#pragma once

#include <complex>
#include <functional>

#include "ctrw/errors.hpp"

namespace ctrw {

/// Gaver-Stehfest configuration. The inverter evaluates the whole ladder of
/// even orders [min_order, max_order] in long double, estimates the error of
/// each order from its two neighbouring pair-differences, and returns the
/// order with the smallest estimate. InversionUnstable is thrown when that
/// estimate still exceeds tolerance * max(1, |value|).
struct GaverStehfestOptions {
    int min_order = 10;
    int max_order = 22;
    double tolerance = 1e-5;
};

struct TalbotOptions {
    int nodes = 32;
};

struct Inversion {
    double value;
    double error_estimate;
    int order; // ladder order actually used
};

/// Numerical inverse Laplace transform at t > 0 from real-axis samples
/// (Gaver-Stehfest ladder). The evaluator must accept long double s > 0.
Inversion invert_laplace(const std::function<long double(long double)>& f_hat,
                         double t, const GaverStehfestOptions& options = {});

/// Fixed-contour Talbot inversion from complex samples; used as the
/// independent cross-check of the Gaver-Stehfest route.
double invert_laplace_talbot(
    const std::function<std::complex<double>(std::complex<double>)>& f_hat,
    double t, const TalbotOptions& options = {});

/// Inversion of a survival transform: the raw result is clamped to [0, 1]
/// and the pre-clamp residual reported.
struct SurvivalValue {
    double value;          // clamped to [0, 1]
    double clamp_residual; // raw - clamped (signed)
    double error_estimate;
};

SurvivalValue invert_survival(const std::function<long double(long double)>& f_hat,
                              double t, const GaverStehfestOptions& options = {});

} // namespace ctrw
