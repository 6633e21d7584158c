#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <type_traits>

#include "ctrw/errors.hpp"
#include "ctrw/process.hpp"

namespace ctrw {

enum class Side { Up, Down };

/// Corridor survival query: start x0 inside [lower, upper], Laplace variable
/// s > 0. Infinite bounds use the +-infinity sentinel (never a large float);
/// survival_laplace dispatches them to the one-sided code paths.
struct CorridorQuery {
    double lower;
    double upper;
    double x0;
    double s;
};

/// Exponents alpha >= beta of the corridor solution,
///   alpha + beta = rho - gamma,   alpha * beta = -gamma rho (1 - psi^).
struct Auxiliaries {
    double alpha;
    double beta;
};

/// Drift and volatility of the comparison Wiener process.
struct WienerParams {
    double sigma;
    double vartheta;
};

namespace detail {

template <typename Scalar>
struct ExponentPair {
    Scalar alpha;
    Scalar beta;
};

template <typename Scalar>
constexpr bool is_real_scalar_v = std::is_floating_point_v<Scalar>;

/// alpha, beta = (rho-gamma)/2 +- sqrt(((rho-gamma)/2)^2 + gamma rho (1-psi^)).
/// The discriminant is assembled from (1 - psi^) directly so nothing cancels;
/// for real psi^ the root with no subtraction is computed first and the other
/// recovered from the product identity.
template <typename Scalar>
ExponentPair<Scalar> corridor_exponents(double rho, double gamma, Scalar psi_hat) {
    const Scalar q = Scalar(0.5) * (Scalar(rho) - Scalar(gamma));
    const Scalar one_minus_psi = Scalar(1) - psi_hat;
    const Scalar product = -Scalar(gamma) * Scalar(rho) * one_minus_psi;
    const Scalar root = std::sqrt(q * q - product);
    if constexpr (is_real_scalar_v<Scalar>) {
        if (product == Scalar(0)) {
            // psi^ = 1: roots are {rho-gamma, 0} ordered by sign.
            return q >= Scalar(0) ? ExponentPair<Scalar>{Scalar(2) * q, Scalar(0)}
                                  : ExponentPair<Scalar>{Scalar(0), Scalar(2) * q};
        }
        if (q >= Scalar(0)) {
            const Scalar alpha = q + root;
            return {alpha, product / alpha};
        }
        const Scalar beta = q - root;
        return {product / beta, beta};
    } else {
        return {q + root, q - root};
    }
}

/// One-sided survival transform; log_ratio = x0 - ln(K0) = ln(S0/K0).
///   up:   Phi^+ = (1/s) [1 - gamma psi^/(gamma+alpha) e^{alpha log_ratio}]
///   down: Phi^- = (1/s) [1 - rho   psi^/(rho - beta)  e^{beta  log_ratio}]
template <typename Scalar>
Scalar phi_one_sided(double rho, double gamma, double lambda, Scalar s,
                     double log_ratio, Side side) {
    const Scalar psi = psi_hat_exponential<Scalar>(lambda, s);
    const ExponentPair<Scalar> e = corridor_exponents<Scalar>(rho, gamma, psi);
    if (side == Side::Up) {
        const Scalar hit = Scalar(gamma) * psi / (Scalar(gamma) + e.alpha)
                           * std::exp(e.alpha * Scalar(log_ratio));
        return (Scalar(1) - hit) / s;
    }
    const Scalar hit = Scalar(rho) * psi / (Scalar(rho) - e.beta)
                       * std::exp(e.beta * Scalar(log_ratio));
    return (Scalar(1) - hit) / s;
}

} // namespace detail

/// Corridor exponents for a given psi^(s) in [0, 1] (1e-12 slack).
Auxiliaries auxiliaries(const JumpLaw& jumps, double psi_hat);

/// Laplace-domain survival probability of the walk in the finite corridor
/// [q.lower, q.upper]; exponential waits only. The dominant exponential is
/// factored out of numerator and denominator, so corridors hundreds of
/// log-units wide evaluate without overflow.
double survival_corridor_laplace(const MarketModel& model, const CorridorQuery& q);

/// Dispatcher over the CorridorQuery sentinel: both bounds finite -> corridor
/// formula; exactly one infinite -> the matching one-sided transform.
double survival_laplace(const MarketModel& model, const CorridorQuery& q);

/// Laplace transform of the complementary distribution of the first
/// up-crossing time of ln(K0); requires x0 <= ln(K0), s > 0, exponential
/// waits. Value lies in (0, 1/s].
double phi_plus_laplace(const MarketModel& model, double k0_log, double x0, double s);

/// Down-crossing counterpart; requires x0 >= ln(K0).
double phi_minus_laplace(const MarketModel& model, double k0_log, double x0, double s);

/// Same transform for a Wiener process with drift vartheta and volatility
/// sigma: (1/s) [1 - (S0/K0)^e] with e the up or down exponent.
double wiener_phi(const WienerParams& params, double k0_log, double x0, double s, Side side);

/// Evaluators of Phi^+- for the Laplace inverters: real (long double) for
/// Gaver-Stehfest, complex for Talbot. The model is captured by value.
std::function<long double(long double)>
phi_transform_real(const MarketModel& model, double k0_log, double x0, Side side);

std::function<std::complex<double>(std::complex<double>)>
phi_transform_complex(const MarketModel& model, double k0_log, double x0, Side side);

} // namespace ctrw
