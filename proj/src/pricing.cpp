#include "ctrw/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace ctrw {

namespace {

void require_risk_neutral(const MarketModel& model) {
    if (!model.is_risk_neutral()) {
        throw InfeasibleRiskNeutral(
            "closed-form pricing requires a risk-neutral model (lambda = martingale_rate)");
    }
    model.validate();
}

double put_boundary(const JumpLaw& jumps, double strike) {
    const double rho = jumps.rho, gamma = jumps.gamma;
    return strike * (gamma + 1.0) * (gamma - rho + 1.0) / (gamma * (gamma - rho + 2.0));
}

} // namespace

double OptionSpec::intrinsic(double s0) const {
    switch (payoff) {
        case PayoffKind::BinaryCall: return s0 > strike ? 1.0 : 0.0;
        case PayoffKind::BinaryPut: return s0 < strike ? 1.0 : 0.0;
        case PayoffKind::VanillaCall: return std::max(s0 - strike, 0.0);
        case PayoffKind::VanillaPut: return std::max(strike - s0, 0.0);
    }
    return 0.0;
}

PriceResult binary_price(const MarketModel& model, const OptionSpec& spec) {
    if (!spec.is_binary()) {
        throw DomainError("binary_price: spec must be a binary payoff");
    }
    require_risk_neutral(model);
    const double rho = model.jumps.rho, gamma = model.jumps.gamma;
    const double ratio = model.s0 / spec.strike;
    if (spec.payoff == PayoffKind::BinaryCall) {
        if (ratio > 1.0) {
            return {1.0, spec.strike, ExerciseRegime::Immediate};
        }
        return {(rho - 1.0) / rho * ratio, spec.strike, ExerciseRegime::Live};
    }
    if (ratio < 1.0) {
        return {1.0, spec.strike, ExerciseRegime::Immediate};
    }
    const double price =
        (rho - 1.0) / gamma * std::pow(1.0 / ratio, gamma - rho + 1.0);
    return {price, spec.strike, ExerciseRegime::Live};
}

double binary_price_via_survival(const MarketModel& model, const OptionSpec& spec) {
    if (!spec.is_binary()) {
        throw DomainError("binary_price_via_survival: spec must be a binary payoff");
    }
    require_risk_neutral(model);
    const double k0_log = std::log(spec.strike);
    const double x0 = model.x0();
    if (spec.payoff == PayoffKind::BinaryCall) {
        if (x0 > k0_log) {
            return 1.0;
        }
        return 1.0 - model.r * phi_plus_laplace(model, k0_log, x0, model.r);
    }
    if (x0 < k0_log) {
        return 1.0;
    }
    return 1.0 - model.r * phi_minus_laplace(model, k0_log, x0, model.r);
}

PriceResult vanilla_put_price(const MarketModel& model, const OptionSpec& spec) {
    if (spec.payoff != PayoffKind::VanillaPut) {
        throw DomainError("vanilla_put_price: spec must be a vanilla put");
    }
    require_risk_neutral(model);
    const double rho = model.jumps.rho, gamma = model.jumps.gamma;
    const double strike = spec.strike;
    const double boundary = put_boundary(model.jumps, strike);
    if (model.s0 < boundary) {
        return {strike - model.s0, boundary, ExerciseRegime::Immediate};
    }
    const double price = (strike - gamma / (gamma + 1.0) * boundary)
                         * (rho - 1.0) / gamma
                         * std::pow(boundary / model.s0, gamma - rho + 1.0);
    return {price, boundary, ExerciseRegime::Live};
}

PriceResult vanilla_call_price(const MarketModel& model, const OptionSpec& spec) {
    if (spec.payoff != PayoffKind::VanillaCall) {
        throw DomainError("vanilla_call_price: spec must be a vanilla call");
    }
    require_risk_neutral(model);
    return {model.s0, std::nullopt, ExerciseRegime::Never};
}

PriceResult price(const MarketModel& model, const OptionSpec& spec) {
    switch (spec.payoff) {
        case PayoffKind::BinaryCall:
        case PayoffKind::BinaryPut: return binary_price(model, spec);
        case PayoffKind::VanillaCall: return vanilla_call_price(model, spec);
        case PayoffKind::VanillaPut: return vanilla_put_price(model, spec);
    }
    throw DomainError("price: unknown payoff");
}

double expected_exercise_payoff(const MarketModel& model, double boundary, Side side) {
    require_risk_neutral(model);
    if (!(boundary > 0.0)) {
        throw DomainError("expected_exercise_payoff: boundary must be positive");
    }
    const double rho = model.jumps.rho, gamma = model.jumps.gamma;
    return side == Side::Up ? boundary * rho / (rho - 1.0)
                            : boundary * gamma / (gamma + 1.0);
}

PriceResult bs_limit_price(double r, double sigma, const OptionSpec& spec, double s0) {
    if (!(sigma > 0.0) || !(r > 0.0)) {
        throw DomainError("bs_limit_price: r and sigma must be positive");
    }
    if (!(s0 > 0.0)) {
        throw DomainError("bs_limit_price: spot must be positive");
    }
    const double epsilon = 2.0 * r / (sigma * sigma);
    switch (spec.payoff) {
        case PayoffKind::BinaryCall: {
            const double ratio = s0 / spec.strike;
            if (ratio >= 1.0) {
                return {1.0, spec.strike, ExerciseRegime::Immediate};
            }
            return {ratio, spec.strike, ExerciseRegime::Live};
        }
        case PayoffKind::BinaryPut: {
            const double ratio = spec.strike / s0;
            if (ratio >= 1.0) {
                return {1.0, spec.strike, ExerciseRegime::Immediate};
            }
            return {std::pow(ratio, epsilon), spec.strike, ExerciseRegime::Live};
        }
        case PayoffKind::VanillaCall:
            return {s0, std::nullopt, ExerciseRegime::Never};
        case PayoffKind::VanillaPut: {
            const double boundary = spec.strike * epsilon / (1.0 + epsilon);
            if (s0 < boundary) {
                return {spec.strike - s0, boundary, ExerciseRegime::Immediate};
            }
            const double price = (spec.strike - boundary)
                                 * std::pow(boundary / s0, epsilon);
            return {price, boundary, ExerciseRegime::Live};
        }
    }
    throw DomainError("bs_limit_price: unknown payoff");
}

std::vector<ConvergenceRow> convergence_table(double r, double sigma,
                                              const std::vector<double>& rhos,
                                              const std::vector<double>& moneyness) {
    if (!(sigma > 0.0) || !(r > 0.0)) {
        throw DomainError("convergence_table: r and sigma must be positive");
    }
    const double epsilon = 2.0 * r / (sigma * sigma);
    std::vector<double> sorted_rhos = rhos;
    std::sort(sorted_rhos.begin(), sorted_rhos.end());
    std::vector<double> sorted_m = moneyness;
    std::sort(sorted_m.begin(), sorted_m.end());

    std::vector<ConvergenceRow> rows;
    rows.reserve(sorted_rhos.size() * sorted_m.size());
    const OptionSpec put = OptionSpec::vanilla_put(1.0);
    for (double rho : sorted_rhos) {
        const JumpLaw jumps(rho, rho - 1.0 + epsilon);
        for (double m : sorted_m) {
            const MarketModel model = MarketModel::risk_neutral(jumps, r, m);
            rows.push_back({rho, m, vanilla_put_price(model, put).price,
                            bs_limit_price(r, sigma, put, m).price});
        }
    }
    return rows;
}

} // namespace ctrw
