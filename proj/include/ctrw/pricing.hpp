#pragma once

#include <optional>
#include <vector>

#include "ctrw/process.hpp"
#include "ctrw/survival.hpp"

namespace ctrw {

enum class PayoffKind { BinaryCall, BinaryPut, VanillaCall, VanillaPut };

/// Payoff description; `strike` is K for vanilla payoffs, K0 for binaries.
struct OptionSpec {
    PayoffKind payoff;
    double strike;

    static OptionSpec binary_call(double k0) { return make(PayoffKind::BinaryCall, k0); }
    static OptionSpec binary_put(double k0) { return make(PayoffKind::BinaryPut, k0); }
    static OptionSpec vanilla_call(double k) { return make(PayoffKind::VanillaCall, k); }
    static OptionSpec vanilla_put(double k) { return make(PayoffKind::VanillaPut, k); }

    bool is_binary() const {
        return payoff == PayoffKind::BinaryCall || payoff == PayoffKind::BinaryPut;
    }
    bool is_call() const {
        return payoff == PayoffKind::BinaryCall || payoff == PayoffKind::VanillaCall;
    }

    /// Immediate-exercise value at spot s0.
    double intrinsic(double s0) const;

private:
    static OptionSpec make(PayoffKind kind, double strike) {
        if (!(strike > 0.0)) {
            throw DomainError("OptionSpec: strike must be positive");
        }
        return OptionSpec{kind, strike};
    }
};

enum class ExerciseRegime { Live, Immediate, Never };

struct PriceResult {
    double price;
    /// Optimal exercise level; empty when the option is never exercised.
    std::optional<double> boundary;
    ExerciseRegime regime;
};

/// Perpetual binary (digital) price. Live region: call for S0 <= K0 with
/// D+ = (rho-1)/rho * S0/K0, put for S0 >= K0 with
/// D- = (rho-1)/gamma * (K0/S0)^{gamma-rho+1}. Strictly beyond the threshold
/// the price is 1 (Immediate); at S0 = K0 the Live formula applies and the
/// price is discontinuous. Requires a risk-neutral model.
PriceResult binary_price(const MarketModel& model, const OptionSpec& spec);

/// The same price through the survival route, 1 - r Phi^+-(s = r); kept as a
/// separate code path so the identity can be tested against binary_price.
double binary_price_via_survival(const MarketModel& model, const OptionSpec& spec);

/// Perpetual vanilla put. Boundary
///   H0- = K (gamma+1)(gamma-rho+1) / (gamma (gamma-rho+2)),
/// Live price for S0 >= H0-:
///   V- = (K - gamma/(gamma+1) H0-) (rho-1)/gamma (H0-/S0)^{gamma-rho+1},
/// intrinsic K - S0 below the boundary.
PriceResult vanilla_put_price(const MarketModel& model, const OptionSpec& spec);

/// Perpetual vanilla call: the boundary condition has no finite solution,
/// the option is never exercised and the price equals the spot.
PriceResult vanilla_call_price(const MarketModel& model, const OptionSpec& spec);

/// Dispatch on spec.payoff.
PriceResult price(const MarketModel& model, const OptionSpec& spec);

/// Expected asset value at crossing of `boundary`, given the memoryless
/// overshoot: H rho/(rho-1) upward, H gamma/(gamma+1) downward.
double expected_exercise_payoff(const MarketModel& model, double boundary, Side side);

/// Black-Scholes perpetual prices (the diffusive limit), epsilon = 2r/sigma^2.
PriceResult bs_limit_price(double r, double sigma, const OptionSpec& spec, double s0);

struct ConvergenceRow {
    double rho;
    double moneyness; // S0 / K
    double v_ctrw;    // per unit strike
    double v_bs;      // per unit strike
};

/// Vanilla-put convergence table toward the Black-Scholes limit with
/// gamma = rho - 1 + 2r/sigma^2; rows ordered by rho, then moneyness.
std::vector<ConvergenceRow> convergence_table(double r, double sigma,
                                              const std::vector<double>& rhos,
                                              const std::vector<double>& moneyness);

} // namespace ctrw
