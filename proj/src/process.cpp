#include "ctrw/process.hpp"

#include <cmath>
#include <sstream>

namespace ctrw {

namespace {

constexpr std::complex<double> kImaginary{0.0, 1.0};

void require_feasible(const JumpLaw& jumps) {
    if (jumps.rho - 1.0 < kFeasibilityMargin) {
        std::ostringstream msg;
        msg << "risk-neutral measure infeasible: rho > 1 violated (rho = "
            << jumps.rho << ")";
        throw InfeasibleRiskNeutral(msg.str());
    }
    if (jumps.gamma - (jumps.rho - 1.0) < kFeasibilityMargin) {
        std::ostringstream msg;
        msg << "risk-neutral measure infeasible: gamma > rho - 1 violated (gamma = "
            << jumps.gamma << ", rho - 1 = " << jumps.rho - 1.0 << ")";
        throw InfeasibleRiskNeutral(msg.str());
    }
}

} // namespace

std::complex<double> JumpLaw::fourier(std::complex<double> omega) const {
    const double c = gamma * rho / (gamma + rho);
    return c * (1.0 / (rho - kImaginary * omega) + 1.0 / (gamma + kImaginary * omega));
}

double JumpLaw::unit_exponential_moment() const {
    require_feasible(*this);
    return gamma * rho / ((rho - 1.0) * (gamma + 1.0));
}

double WaitingLaw::rate() const {
    if (kind_ != Kind::Exponential) {
        throw InfeasibleRiskNeutral(
            "closed-form operations require an exponential waiting law");
    }
    return lambda_;
}

double martingale_rate(const JumpLaw& jumps, double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw DomainError("martingale_rate: r must be finite and non-negative");
    }
    require_feasible(jumps);
    return r * (jumps.rho - 1.0) * (jumps.gamma + 1.0) / (jumps.gamma - jumps.rho + 1.0);
}

MarketModel MarketModel::risk_neutral(const JumpLaw& jumps, double r, double s0) {
    MarketModel m(jumps, WaitingLaw::exponential(martingale_rate(jumps, r)), r, s0,
                  Measure::RiskNeutral);
    m.validate();
    return m;
}

MarketModel MarketModel::physical(const JumpLaw& jumps, const WaitingLaw& waits,
                                  double r, double s0) {
    MarketModel m(jumps, waits, r, s0, Measure::Physical);
    m.validate();
    return m;
}

void MarketModel::validate() const {
    if (!(s0 > 0.0) || !std::isfinite(std::log(s0))) {
        throw DomainError("MarketModel: spot must be positive with finite log");
    }
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw DomainError("MarketModel: r must be finite and non-negative");
    }
    if (measure == Measure::RiskNeutral) {
        const double lambda_star = martingale_rate(jumps, r);
        const double lambda = waits.rate(); // also enforces exponential waits
        if (std::abs(lambda - lambda_star) > 1e-12 * std::abs(lambda_star)) {
            throw InfeasibleRiskNeutral(
                "risk-neutral model must carry lambda = martingale_rate(rho, gamma, r)");
        }
    }
}

std::complex<double> propagator_fl(const MarketModel& model, const TransformPoint& p) {
    if (!(p.s.real() > 0.0)) {
        throw DomainError("propagator_fl: Re(s) must be positive");
    }
    const double lambda = model.waits.rate();
    const std::complex<double> psi = psi_hat_exponential(lambda, p.s);
    const std::complex<double> denom = 1.0 - model.jumps.fourier(p.omega) * psi;
    if (std::abs(denom) < 1e-14) {
        throw DegenerateDenominator("propagator_fl: 1 - h~(omega) psi^(s) vanishes");
    }
    return (1.0 - psi) / (p.s * denom);
}

Increment sample_increment(const MarketModel& model, CounterRng& rng) {
    const double dt = model.waits.sample(rng);
    const bool up = rng.next_uniform() < model.jumps.up_probability();
    const double mag = -std::log(rng.next_uniform());
    const double dx = up ? mag / model.jumps.rho : -mag / model.jumps.gamma;
    return {dt, dx};
}

} // namespace ctrw
