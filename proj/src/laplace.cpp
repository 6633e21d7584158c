#include "ctrw/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace ctrw {

namespace {

// Stehfest coefficients for even order N:
//   zeta_k = (-1)^{k+N/2} sum_j j^{N/2} (2j)! /
//            [(N/2-j)! j! (j-1)! (k-j)! (2j-k)!],  j from ceil(k/2) to min(k, N/2).
// Computed in long double; magnitudes reach ~4e13 at N = 22, which is why the
// ladder tops out there.
std::vector<long double> stehfest_weights(int order) {
    const int half = order / 2;
    std::vector<long double> factorial(2 * order + 1, 1.0L);
    for (int i = 1; i <= 2 * order; ++i) {
        factorial[i] = factorial[i - 1] * static_cast<long double>(i);
    }
    std::vector<long double> weights(order);
    for (int k = 1; k <= order; ++k) {
        long double sum = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            long double term = std::pow(static_cast<long double>(j), half)
                               * factorial[2 * j];
            term /= factorial[half - j] * factorial[j] * factorial[j - 1]
                    * factorial[k - j] * factorial[2 * j - k];
            sum += term;
        }
        weights[k - 1] = ((k + half) % 2 == 0 ? sum : -sum);
    }
    return weights;
}

const std::vector<long double>& cached_weights(int order) {
    static std::mutex guard;
    static std::unordered_map<int, std::vector<long double>> cache;
    std::lock_guard<std::mutex> lock(guard);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, stehfest_weights(order)).first;
    }
    return it->second;
}

long double gaver_stehfest(const std::function<long double(long double)>& f_hat,
                           long double t, int order) {
    const auto& weights = cached_weights(order);
    const long double log2_over_t = std::log(2.0L) / t;
    long double sum = 0.0L;
    for (int k = 1; k <= order; ++k) {
        sum += weights[k - 1] * f_hat(static_cast<long double>(k) * log2_over_t);
    }
    return log2_over_t * sum;
}

} // namespace

Inversion invert_laplace(const std::function<long double(long double)>& f_hat,
                         double t, const GaverStehfestOptions& options) {
    if (!(t > 0.0)) {
        throw DomainError("invert_laplace: t must be positive");
    }
    if (options.min_order < 4 || options.max_order < options.min_order + 2
        || options.min_order % 2 != 0 || options.max_order % 2 != 0) {
        throw DomainError("invert_laplace: orders must be even with max >= min + 2");
    }

    std::vector<double> values;  // v[i] at order min_order + 2i
    for (int n = options.min_order; n <= options.max_order; n += 2) {
        values.push_back(static_cast<double>(gaver_stehfest(f_hat, t, n)));
    }
    std::vector<double> pair_diff(values.size(), 0.0); // |v[i] - v[i-1]|, i >= 1
    for (std::size_t i = 1; i < values.size(); ++i) {
        pair_diff[i] = std::abs(values[i] - values[i - 1]);
    }

    // Error estimate of order i: agreement with both neighbouring orders.
    // A single tight pair inside a slowly converging ladder is a false
    // plateau; requiring the next pair to stay tight rejects it.
    std::size_t best = 1;
    double best_estimate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double estimate =
            i + 1 < values.size() ? std::max(pair_diff[i], pair_diff[i + 1])
                                  : pair_diff[i];
        if (estimate <= best_estimate) {
            best_estimate = estimate;
            best = i;
        }
    }

    const double value = values[best];
    if (best_estimate > options.tolerance * std::max(1.0, std::abs(value))) {
        throw InversionUnstable("invert_laplace: Gaver-Stehfest ladder did not settle");
    }
    return {value, best_estimate, options.min_order + 2 * static_cast<int>(best)};
}

double invert_laplace_talbot(
    const std::function<std::complex<double>(std::complex<double>)>& f_hat,
    double t, const TalbotOptions& options) {
    if (!(t > 0.0)) {
        throw DomainError("invert_laplace_talbot: t must be positive");
    }
    const int m = options.nodes;
    if (m < 4) {
        throw DomainError("invert_laplace_talbot: need at least 4 nodes");
    }
    // Fixed Talbot contour: s_k = delta_k / t with
    //   delta_0 = 2m/5,  delta_k = (2 pi k / 5)(cot(pi k/m) + i).
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
        std::complex<double> delta, weight;
        if (k == 0) {
            delta = 2.0 * m / 5.0;
            weight = 0.5 * std::exp(delta);
        } else {
            const double theta = M_PI * k / m;
            const double cot = std::cos(theta) / std::sin(theta);
            delta = 2.0 * M_PI * k / 5.0 * std::complex<double>(cot, 1.0);
            weight = (1.0 + std::complex<double>(0.0, theta) * (1.0 + cot * cot)
                      - std::complex<double>(0.0, cot))
                     * std::exp(delta);
        }
        sum += (weight * f_hat(delta / t)).real();
    }
    return 2.0 / (5.0 * t) * sum;
}

SurvivalValue invert_survival(const std::function<long double(long double)>& f_hat,
                              double t, const GaverStehfestOptions& options) {
    const Inversion raw = invert_laplace(f_hat, t, options);
    const double clamped = std::min(1.0, std::max(0.0, raw.value));
    return {clamped, raw.value - clamped, raw.error_estimate};
}

} // namespace ctrw
