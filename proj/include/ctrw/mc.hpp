#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ctrw/pricing.hpp"
#include "ctrw/process.hpp"

namespace ctrw::mc {

/// One estimate per time: fraction of paths still inside the barrier at t.
struct SurvivalAtTimes {
    std::vector<double> times;
};

/// E[e^{-s tau} 1_{crossed}] for the first exit time tau.
struct DiscountedCrossing {
    double s;
};

/// E[payoff(S(tau)) e^{-r tau}] for the first crossing of ln(boundary);
/// the crossing side follows the payoff (puts down, calls up).
struct DiscountedPayoff {
    OptionSpec spec;
    double boundary;
};

/// One estimate per time: E[S(t) e^{-rt} / S0].
struct MartingaleCheck {
    std::vector<double> times;
};

using Estimator =
    std::variant<SurvivalAtTimes, DiscountedCrossing, DiscountedPayoff, MartingaleCheck>;

/// Log-price exit levels; unset bound = that side is open.
struct Barrier {
    std::optional<double> lower_log;
    std::optional<double> upper_log;
};

struct SimulationPlan {
    MarketModel model;
    Estimator estimator;
    Barrier barrier{};            // ignored by MartingaleCheck
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0;         // <= 0: 50 mean sojourns (and >= last time)
    std::int64_t max_jumps = 10'000'000;
    double censoring_bound = 1e-3;
    int threads = 0;              // 0: CTRW_THREADS env, else hardware
};

struct McEstimate {
    double mean;
    double std_error;
    std::int64_t n_effective; // paths that resolved (crossed, or measured at t)
    std::int64_t censored;    // paths stopped by horizon/max_jumps unresolved
};

/// Runs the plan. One estimate per requested time for SurvivalAtTimes and
/// MartingaleCheck, a single estimate otherwise. Bitwise deterministic for a
/// fixed (seed, plan): per-path counter-based substreams, fixed-size path
/// blocks, pairwise reduction in block order — the thread count never shows.
///
/// For discounted estimators with positive rate, throws ExcessiveCensoring
/// when censored_fraction * e^{-rate * horizon} (the per-path bias bound of
/// treating unresolved paths as never crossing) exceeds plan.censoring_bound.
std::vector<McEstimate> run(const SimulationPlan& plan);

/// run() for plans that produce exactly one estimate.
McEstimate run_scalar(const SimulationPlan& plan);

/// Crossing overshoot sample in log space, tested against its theoretical
/// exponential law (rate rho above, gamma below) with a Kolmogorov-Smirnov
/// statistic. The plan must carry a one-sided barrier and a crossing
/// estimator.
struct OvershootStats {
    double mean;
    double mean_std_error;
    std::int64_t n_crossings;
    double ks_statistic;
    double ks_p_value;
    double reference_rate;
    std::vector<std::int64_t> histogram;
    double bin_width;
};

OvershootStats overshoot_distribution(const SimulationPlan& plan);

/// Asymptotic two-sided Kolmogorov-Smirnov p-value for statistic d at sample
/// size n (Stephens' small-sample correction).
double ks_p_value(double d, std::int64_t n);

} // namespace ctrw::mc
