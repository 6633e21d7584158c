#pragma once

#include <complex>
#include <cstdint>

#include "ctrw/errors.hpp"
#include "ctrw/rng.hpp"

namespace ctrw {

/// Minimum distance from the feasibility boundary rho = 1, gamma = rho - 1
/// accepted by the risk-neutral constraint; closer parameters make lambda
/// vanish or diverge and downstream formulas lose precision.
inline constexpr double kFeasibilityMargin = 1e-9;

/// Two-sided exponential law for log-return jumps: density
///   h(x) = gamma*rho/(gamma+rho) * [ e^{-rho x} (x >= 0) + e^{gamma x} (x < 0) ].
/// `rho` is the decay rate of positive jumps, `gamma` of negative ones.
struct JumpLaw {
    double rho;
    double gamma;

    JumpLaw(double rho_, double gamma_) : rho(rho_), gamma(gamma_) {
        if (!(rho > 0.0) || !(gamma > 0.0)) {
            throw DomainError("JumpLaw: rho and gamma must be positive");
        }
    }

    /// Probability that a jump is positive: gamma/(gamma+rho).
    double up_probability() const { return gamma / (gamma + rho); }

    /// Mean jump, (gamma - rho)/(gamma*rho).
    double mean() const { return (gamma - rho) / (gamma * rho); }

    double density(double x) const {
        const double c = gamma * rho / (gamma + rho);
        return x >= 0.0 ? c * std::exp(-rho * x) : c * std::exp(gamma * x);
    }

    /// Fourier transform h~(omega) = E[e^{i omega x}] for complex omega;
    /// analytic for -gamma < Im(omega) < rho.
    std::complex<double> fourier(std::complex<double> omega) const;

    /// h~(-i) = E[e^x], the expected one-jump price multiplier.
    /// Finite only for rho > 1.
    double unit_exponential_moment() const;
};

/// Sojourn-time law between jumps. Exponential is the only kind accepted by
/// closed-form operations; the two-point mixture exists for simulation only.
class WaitingLaw {
public:
    enum class Kind { Exponential, TwoPointMixture };

    static WaitingLaw exponential(double lambda) {
        if (!(lambda > 0.0)) {
            throw DomainError("WaitingLaw: lambda must be positive");
        }
        WaitingLaw w;
        w.kind_ = Kind::Exponential;
        w.lambda_ = lambda;
        return w;
    }

    /// Atoms at t_short (probability p_short) and t_long.
    static WaitingLaw two_point_mixture(double t_short, double t_long, double p_short) {
        if (!(t_short > 0.0) || !(t_long > 0.0) || !(p_short >= 0.0 && p_short <= 1.0)) {
            throw DomainError("WaitingLaw: two-point mixture needs positive atoms and p in [0,1]");
        }
        WaitingLaw w;
        w.kind_ = Kind::TwoPointMixture;
        w.t_short_ = t_short;
        w.t_long_ = t_long;
        w.p_short_ = p_short;
        return w;
    }

    Kind kind() const { return kind_; }
    bool is_exponential() const { return kind_ == Kind::Exponential; }

    /// Rate of the exponential law; InfeasibleRiskNeutral otherwise.
    double rate() const;

    /// Mean sojourn time mu.
    double mean() const {
        return kind_ == Kind::Exponential ? 1.0 / lambda_
                                          : p_short_ * t_short_ + (1.0 - p_short_) * t_long_;
    }

    double sample(CounterRng& rng) const {
        return kind_ == Kind::Exponential ? rng.next_exponential(lambda_)
                                          : (rng.next_uniform() < p_short_ ? t_short_ : t_long_);
    }

private:
    WaitingLaw() = default;

    Kind kind_ = Kind::Exponential;
    double lambda_ = 1.0;
    double t_short_ = 0.0;
    double t_long_ = 0.0;
    double p_short_ = 0.0;
};

/// Laplace transform of an exponential waiting law, psi^(s) = lambda/(lambda+s).
template <typename Scalar>
Scalar psi_hat_exponential(double lambda, Scalar s) {
    return Scalar(lambda) / (Scalar(lambda) + s);
}

enum class Measure { RiskNeutral, Physical };

/// Full CTRW market specification: jump law, waiting law, risk-free rate and
/// spot. A RiskNeutral model always carries exponential waits with
/// lambda = martingale_rate(jumps, r).
struct MarketModel {
    JumpLaw jumps;
    WaitingLaw waits;
    double r;
    double s0;
    Measure measure;

    /// Risk-neutral model: exponential waits, rate fixed by the martingale
    /// constraint. Throws InfeasibleRiskNeutral outside gamma > rho - 1 > 0.
    static MarketModel risk_neutral(const JumpLaw& jumps, double r, double s0);

    /// Physical-measure model with an arbitrary waiting law. Closed-form
    /// pricing refuses these; survival evaluation and simulation accept them.
    static MarketModel physical(const JumpLaw& jumps, const WaitingLaw& waits,
                                double r, double s0);

    bool is_risk_neutral() const { return measure == Measure::RiskNeutral; }

    /// Starting log-price x0 = ln(S0).
    double x0() const { return std::log(s0); }

    /// Re-checks the type invariants (positivity, finite x0, and the
    /// lambda = martingale_rate identity to 1e-12 relative when risk-neutral).
    void validate() const;

private:
    MarketModel(JumpLaw j, WaitingLaw w, double r_, double s0_, Measure m)
        : jumps(j), waits(w), r(r_), s0(s0_), measure(m) {}
};

/// Point in the Fourier-Laplace domain; Re(s) > 0 required.
struct TransformPoint {
    std::complex<double> omega;
    std::complex<double> s;
};

/// Risk-neutral jump rate lambda = r (rho-1)(gamma+1)/(gamma-rho+1),
/// equivalently r/(h~(-i) - 1). Feasible only for gamma > rho - 1 > 0;
/// throws InfeasibleRiskNeutral naming the violated inequality.
double martingale_rate(const JumpLaw& jumps, double r);

/// Fourier-Laplace propagator of the walk,
///   p^~(omega, s) = (1/s) (1 - psi^(s)) / (1 - h~(omega) psi^(s)).
/// Requires exponential waits and Re(s) > 0.
std::complex<double> propagator_fl(const MarketModel& model, const TransformPoint& p);

struct Increment {
    double dt;
    double dx;
};

/// One (waiting time, log-return) draw. Deterministic given the rng state:
/// one uniform for the wait, one for the jump sign, one for its magnitude.
Increment sample_increment(const MarketModel& model, CounterRng& rng);

} // namespace ctrw
