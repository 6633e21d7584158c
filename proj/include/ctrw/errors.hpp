#pragma once

#include <stdexcept>
#include <string>

namespace ctrw {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A transform or corridor denominator is too close to zero to divide by.
class DegenerateDenominator : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No risk-neutral measure exists for the requested parameters, or a
/// closed-form operation was asked to price a model that is not risk-neutral.
/// The message names the violated inequality (rho > 1, gamma > rho - 1, ...).
class InfeasibleRiskNeutral : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Successive-order estimates of a numerical Laplace inversion disagree
/// beyond the configured tolerance.
class InversionUnstable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too many Monte Carlo paths terminated without resolution for the
/// requested discounted estimator to stay within its bias budget.
class ExcessiveCensoring : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ctrw
