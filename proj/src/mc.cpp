#include "ctrw/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace ctrw::mc {

namespace {

constexpr std::int64_t kBlockSize = 8192;
constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    int cap = std::numeric_limits<int>::max();
    if (const char* env = std::getenv("CTRW_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) {
            cap = parsed;
        }
    }
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, std::min(cap, hw > 0 ? hw : 1));
}

struct BlockSums {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::int64_t effective = 0;
    std::int64_t censored = 0;
    std::vector<double> overshoots; // only filled by the overshoot runner

    explicit BlockSums(std::size_t n_estimates = 0)
        : sum(n_estimates, 0.0), sum_sq(n_estimates, 0.0) {}

    void absorb(const BlockSums& other) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += other.sum[i];
            sum_sq[i] += other.sum_sq[i];
        }
        effective += other.effective;
        censored += other.censored;
        overshoots.insert(overshoots.end(), other.overshoots.begin(),
                          other.overshoots.end());
    }
};

// Fixed-shape pairwise reduction over block index; the tree does not depend
// on which thread produced which block.
BlockSums pairwise_reduce(std::vector<BlockSums>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        return std::move(blocks[lo]);
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockSums left = pairwise_reduce(blocks, lo, mid);
    BlockSums right = pairwise_reduce(blocks, mid, hi);
    left.absorb(right);
    return left;
}

template <typename PathFn>
BlockSums run_blocks(const SimulationPlan& plan, std::size_t n_estimates, PathFn&& body) {
    const std::int64_t n_blocks = (plan.n_paths + kBlockSize - 1) / kBlockSize;
    std::vector<BlockSums> blocks(static_cast<std::size_t>(n_blocks),
                                  BlockSums(n_estimates));
    std::atomic<std::int64_t> next_block{0};
    const int n_threads =
        static_cast<int>(std::min<std::int64_t>(resolve_threads(plan.threads), n_blocks));

    auto worker = [&]() {
        for (;;) {
            const std::int64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) {
                return;
            }
            BlockSums& out = blocks[static_cast<std::size_t>(b)];
            const std::int64_t first = b * kBlockSize;
            const std::int64_t last = std::min(first + kBlockSize, plan.n_paths);
            for (std::int64_t path = first; path < last; ++path) {
                CounterRng rng(plan.seed, static_cast<std::uint64_t>(path));
                body(rng, out);
            }
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return pairwise_reduce(blocks, 0, blocks.size());
}

McEstimate finalize(double sum, double sum_sq, std::int64_t n,
                    std::int64_t effective, std::int64_t censored) {
    const double mean = sum / static_cast<double>(n);
    double std_error = 0.0;
    if (n > 1) {
        const double variance =
            std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean)
                              / static_cast<double>(n - 1));
        std_error = std::sqrt(variance / static_cast<double>(n));
    }
    return {mean, std_error, effective, censored};
}

double effective_horizon(const SimulationPlan& plan, double min_needed) {
    double h = plan.horizon > 0.0 ? plan.horizon : 50.0 * plan.model.waits.mean();
    if (min_needed > 0.0) {
        if (plan.horizon > 0.0 && plan.horizon < min_needed) {
            throw DomainError("mc::run: horizon shorter than the last requested time");
        }
        h = std::max(h, min_needed);
    }
    return h;
}

void validate_common(const SimulationPlan& plan) {
    plan.model.validate();
    if (plan.n_paths < 1) {
        throw DomainError("mc::run: n_paths must be at least 1");
    }
    if (plan.max_jumps < 1) {
        throw DomainError("mc::run: max_jumps must be at least 1");
    }
}

struct BarrierLog {
    double lo = -kInf;
    double hi = kInf;
};

BarrierLog resolve_barrier(const SimulationPlan& plan) {
    BarrierLog b;
    if (plan.barrier.lower_log) {
        b.lo = *plan.barrier.lower_log;
    }
    if (plan.barrier.upper_log) {
        b.hi = *plan.barrier.upper_log;
    }
    if (b.lo == -kInf && b.hi == kInf) {
        throw DomainError("mc::run: crossing estimator needs a barrier");
    }
    if (!(b.lo < b.hi)) {
        throw DomainError("mc::run: barrier bounds must satisfy lower < upper");
    }
    const double x0 = plan.model.x0();
    // Starting on a boundary is alive; crossing requires a jump strictly beyond.
    if (x0 > b.hi || x0 < b.lo) {
        throw DomainError("mc::run: start lies beyond the barrier");
    }
    return b;
}

void check_censoring(const SimulationPlan& plan, double rate, double horizon,
                     const BlockSums& totals) {
    if (!(rate > 0.0)) {
        return;
    }
    const double frac = static_cast<double>(totals.censored)
                        / static_cast<double>(plan.n_paths);
    if (frac * std::exp(-rate * horizon) > plan.censoring_bound) {
        throw ExcessiveCensoring(
            "mc::run: censoring bias bound " + std::to_string(frac * std::exp(-rate * horizon))
            + " exceeds " + std::to_string(plan.censoring_bound)
            + "; extend the horizon or max_jumps");
    }
}

std::vector<McEstimate> run_discounted_crossing(const SimulationPlan& plan,
                                                const DiscountedCrossing& est) {
    const BarrierLog barrier = resolve_barrier(plan);
    const double horizon = effective_horizon(plan, 0.0);
    const double x0 = plan.model.x0();
    if (!(est.s >= 0.0)) {
        throw DomainError("mc::run: discount rate must be non-negative");
    }

    BlockSums totals = run_blocks(plan, 1, [&](CounterRng& rng, BlockSums& out) {
        double t = 0.0, x = x0;
        std::int64_t jumps = 0;
        while (true) {
            if (jumps >= plan.max_jumps) {
                ++out.censored;
                return;
            }
            const Increment inc = sample_increment(plan.model, rng);
            ++jumps;
            if (t + inc.dt > horizon) {
                ++out.censored;
                return;
            }
            t += inc.dt;
            x += inc.dx;
            if (x > barrier.hi || x < barrier.lo) {
                const double v = std::exp(-est.s * t);
                out.sum[0] += v;
                out.sum_sq[0] += v * v;
                ++out.effective;
                return;
            }
        }
    });
    check_censoring(plan, est.s, horizon, totals);
    return {finalize(totals.sum[0], totals.sum_sq[0], plan.n_paths, totals.effective,
                     totals.censored)};
}

std::vector<McEstimate> run_discounted_payoff(const SimulationPlan& plan,
                                              const DiscountedPayoff& est) {
    if (!(est.boundary > 0.0)) {
        throw DomainError("mc::run: exercise boundary must be positive");
    }
    SimulationPlan inner = plan;
    const double level = std::log(est.boundary);
    inner.barrier = est.spec.is_call() ? Barrier{std::nullopt, level}
                                       : Barrier{level, std::nullopt};
    const BarrierLog barrier = resolve_barrier(inner);
    const double horizon = effective_horizon(plan, 0.0);
    const double x0 = plan.model.x0();
    const double r = plan.model.r;
    const OptionSpec spec = est.spec;

    BlockSums totals = run_blocks(plan, 1, [&](CounterRng& rng, BlockSums& out) {
        double t = 0.0, x = x0;
        std::int64_t jumps = 0;
        while (true) {
            if (jumps >= plan.max_jumps) {
                ++out.censored;
                return;
            }
            const Increment inc = sample_increment(plan.model, rng);
            ++jumps;
            if (t + inc.dt > horizon) {
                ++out.censored;
                return;
            }
            t += inc.dt;
            x += inc.dx;
            if (x > barrier.hi || x < barrier.lo) {
                const double v = spec.intrinsic(std::exp(x)) * std::exp(-r * t);
                out.sum[0] += v;
                out.sum_sq[0] += v * v;
                ++out.effective;
                return;
            }
        }
    });
    check_censoring(plan, r, horizon, totals);
    return {finalize(totals.sum[0], totals.sum_sq[0], plan.n_paths, totals.effective,
                     totals.censored)};
}

std::vector<McEstimate> run_survival(const SimulationPlan& plan,
                                     const SurvivalAtTimes& est) {
    if (est.times.empty()) {
        throw DomainError("mc::run: SurvivalAtTimes needs at least one time");
    }
    std::vector<double> times = est.times;
    std::sort(times.begin(), times.end());
    if (!(times.front() > 0.0)) {
        throw DomainError("mc::run: survival times must be positive");
    }
    const BarrierLog barrier = resolve_barrier(plan);
    effective_horizon(plan, times.back()); // validates a user-set horizon
    const double x0 = plan.model.x0();
    const std::size_t nt = times.size();

    BlockSums totals = run_blocks(plan, nt, [&](CounterRng& rng, BlockSums& out) {
        double t = 0.0, x = x0;
        std::size_t ti = 0;
        std::int64_t jumps = 0;
        while (ti < nt) {
            if (jumps >= plan.max_jumps) {
                // Unresolved beyond this point; classified alive and counted.
                ++out.censored;
                for (; ti < nt; ++ti) {
                    out.sum[ti] += 1.0;
                    out.sum_sq[ti] += 1.0;
                }
                return;
            }
            const Increment inc = sample_increment(plan.model, rng);
            ++jumps;
            const double t_next = t + inc.dt;
            for (; ti < nt && times[ti] < t_next; ++ti) {
                out.sum[ti] += 1.0;
                out.sum_sq[ti] += 1.0;
            }
            if (ti == nt) {
                break;
            }
            t = t_next;
            x += inc.dx;
            if (x > barrier.hi || x < barrier.lo) {
                break; // remaining times are at or after the crossing: dead
            }
        }
        ++out.effective;
    });

    std::vector<McEstimate> result;
    result.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        result.push_back(finalize(totals.sum[i], totals.sum_sq[i], plan.n_paths,
                                  totals.effective, totals.censored));
    }
    return result;
}

std::vector<McEstimate> run_martingale(const SimulationPlan& plan,
                                       const MartingaleCheck& est) {
    if (est.times.empty()) {
        throw DomainError("mc::run: MartingaleCheck needs at least one time");
    }
    std::vector<double> times = est.times;
    std::sort(times.begin(), times.end());
    if (!(times.front() > 0.0)) {
        throw DomainError("mc::run: check times must be positive");
    }
    effective_horizon(plan, times.back());
    const double x0 = plan.model.x0();
    const double r = plan.model.r;
    const std::size_t nt = times.size();

    BlockSums totals = run_blocks(plan, nt, [&](CounterRng& rng, BlockSums& out) {
        double t = 0.0, x = x0;
        std::size_t ti = 0;
        std::int64_t jumps = 0;
        while (ti < nt && jumps < plan.max_jumps) {
            const Increment inc = sample_increment(plan.model, rng);
            ++jumps;
            const double t_next = t + inc.dt;
            // X is constant on [t, t_next); every check time in there sees x.
            for (; ti < nt && times[ti] < t_next; ++ti) {
                const double v = std::exp(x - x0 - r * times[ti]);
                out.sum[ti] += v;
                out.sum_sq[ti] += v * v;
            }
            t = t_next;
            x += inc.dx;
        }
        if (ti < nt) {
            ++out.censored; // jump budget exhausted; remaining times use last x
            for (; ti < nt; ++ti) {
                const double v = std::exp(x - x0 - r * times[ti]);
                out.sum[ti] += v;
                out.sum_sq[ti] += v * v;
            }
        }
        ++out.effective;
    });

    std::vector<McEstimate> result;
    result.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        result.push_back(finalize(totals.sum[i], totals.sum_sq[i], plan.n_paths,
                                  totals.effective, totals.censored));
    }
    return result;
}

} // namespace

std::vector<McEstimate> run(const SimulationPlan& plan) {
    validate_common(plan);
    return std::visit(
        [&](const auto& est) -> std::vector<McEstimate> {
            using T = std::decay_t<decltype(est)>;
            if constexpr (std::is_same_v<T, SurvivalAtTimes>) {
                return run_survival(plan, est);
            } else if constexpr (std::is_same_v<T, DiscountedCrossing>) {
                return run_discounted_crossing(plan, est);
            } else if constexpr (std::is_same_v<T, DiscountedPayoff>) {
                return run_discounted_payoff(plan, est);
            } else {
                return run_martingale(plan, est);
            }
        },
        plan.estimator);
}

McEstimate run_scalar(const SimulationPlan& plan) {
    const std::vector<McEstimate> all = run(plan);
    if (all.size() != 1) {
        throw DomainError("mc::run_scalar: plan produces more than one estimate");
    }
    return all.front();
}

double ks_p_value(double d, std::int64_t n) {
    if (d <= 0.0) {
        return 1.0;
    }
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double x = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if (x < 1.18) {
        // Dual theta-series; the alternating form converges too slowly here.
        const double y = std::exp(-M_PI * M_PI / (8.0 * x * x));
        const double p_below = std::sqrt(2.0 * M_PI) / x
                               * (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
        return std::min(1.0, std::max(0.0, 1.0 - p_below));
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * std::exp(-2.0 * j * j * x * x);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) {
            break;
        }
    }
    return std::min(1.0, std::max(0.0, sum));
}

OvershootStats overshoot_distribution(const SimulationPlan& plan) {
    validate_common(plan);
    if (!std::holds_alternative<DiscountedCrossing>(plan.estimator)
        && !std::holds_alternative<DiscountedPayoff>(plan.estimator)) {
        throw DomainError("overshoot_distribution: needs a crossing estimator");
    }
    SimulationPlan inner = plan;
    if (const auto* payoff = std::get_if<DiscountedPayoff>(&plan.estimator)) {
        const double level = std::log(payoff->boundary);
        inner.barrier = payoff->spec.is_call() ? Barrier{std::nullopt, level}
                                               : Barrier{level, std::nullopt};
    }
    if (inner.barrier.lower_log && inner.barrier.upper_log) {
        throw DomainError("overshoot_distribution: barrier must be one-sided");
    }
    const BarrierLog barrier = resolve_barrier(inner);
    const bool up = inner.barrier.upper_log.has_value();
    const double horizon = effective_horizon(plan, 0.0);
    const double x0 = plan.model.x0();

    BlockSums totals = run_blocks(inner, 0, [&](CounterRng& rng, BlockSums& out) {
        double t = 0.0, x = x0;
        std::int64_t jumps = 0;
        while (true) {
            if (jumps >= plan.max_jumps) {
                ++out.censored;
                return;
            }
            const Increment inc = sample_increment(plan.model, rng);
            ++jumps;
            if (t + inc.dt > horizon) {
                ++out.censored;
                return;
            }
            t += inc.dt;
            x += inc.dx;
            if (up ? x > barrier.hi : x < barrier.lo) {
                out.overshoots.push_back(up ? x - barrier.hi : barrier.lo - x);
                ++out.effective;
                return;
            }
        }
    });

    const double rate = up ? plan.model.jumps.rho : plan.model.jumps.gamma;
    std::vector<double>& sample = totals.overshoots;
    const std::int64_t n = static_cast<std::int64_t>(sample.size());
    if (n < 2) {
        throw DomainError("overshoot_distribution: fewer than two crossings observed");
    }

    double sum = 0.0, sum_sq = 0.0;
    for (double v : sample) {
        sum += v;
        sum_sq += v * v;
    }
    const McEstimate mean_est = finalize(sum, sum_sq, n, totals.effective, totals.censored);

    std::sort(sample.begin(), sample.end());
    double d_stat = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-rate * sample[static_cast<std::size_t>(i)]);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - cdf;
        const double lo = cdf - static_cast<double>(i) / static_cast<double>(n);
        d_stat = std::max(d_stat, std::max(hi, lo));
    }

    OvershootStats stats;
    stats.mean = mean_est.mean;
    stats.mean_std_error = mean_est.std_error;
    stats.n_crossings = n;
    stats.ks_statistic = d_stat;
    stats.ks_p_value = ks_p_value(d_stat, n);
    stats.reference_rate = rate;
    stats.bin_width = 0.125 / rate;
    stats.histogram.assign(80, 0);
    for (double v : sample) {
        const auto bin = static_cast<std::size_t>(
            std::min(79.0, std::floor(v / stats.bin_width)));
        ++stats.histogram[bin];
    }
    return stats;
}

} // namespace ctrw::mc
