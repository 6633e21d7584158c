#include "ctrw/survival.hpp"

#include <cmath>

namespace ctrw {

namespace {

void require_positive_s(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw DomainError("survival: Laplace variable s must be positive");
    }
}

double exponential_rate(const MarketModel& model) {
    return model.waits.rate(); // InfeasibleRiskNeutral on non-exponential waits
}

} // namespace

Auxiliaries auxiliaries(const JumpLaw& jumps, double psi_hat) {
    if (psi_hat < -1e-12 || psi_hat > 1.0 + 1e-12) {
        throw DomainError("auxiliaries: psi^ must lie in [0, 1]");
    }
    const double clamped = std::min(1.0, std::max(0.0, psi_hat));
    const auto e = detail::corridor_exponents<double>(jumps.rho, jumps.gamma, clamped);
    return {e.alpha, e.beta};
}

double survival_corridor_laplace(const MarketModel& model, const CorridorQuery& q) {
    require_positive_s(q.s);
    if (!std::isfinite(q.lower) || !std::isfinite(q.upper)) {
        throw DomainError("survival_corridor_laplace: corridor bounds must be finite");
    }
    if (!(q.lower < q.upper) || !(q.x0 >= q.lower) || !(q.x0 <= q.upper)) {
        throw DomainError("survival_corridor_laplace: need lower < upper and x0 inside");
    }
    const double rho = model.jumps.rho;
    const double gamma = model.jumps.gamma;
    const double psi = psi_hat_exponential(exponential_rate(model), q.s);
    const auto [alpha, beta] = detail::corridor_exponents<double>(rho, gamma, psi);

    // Everything below is the closed corridor solution with e^{(alpha-beta) b}
    // factored out of the numerator and the determinant; every remaining
    // exponent is non-positive, so wide corridors cannot overflow.
    const double a = q.lower, b = q.upper, x0 = q.x0;
    const double width = b - a;
    const double t1 = rho * (gamma + beta) * std::exp(alpha * (x0 - b) + beta * width)
                      - gamma * (rho - beta) * std::exp(alpha * (x0 - b));
    const double t2 = gamma * (rho - alpha) * std::exp(beta * (x0 - a) - alpha * width)
                      - rho * (gamma + alpha) * std::exp(beta * (x0 - a));
    const double det = (rho - alpha) * (gamma + beta) * std::exp(-(alpha - beta) * width)
                       - (rho - beta) * (gamma + alpha);
    if (std::abs(det) < 1e-300) {
        throw DegenerateDenominator("survival_corridor_laplace: determinant underflow");
    }
    return (1.0 - psi * (t1 + t2) / det) / q.s;
}

double survival_laplace(const MarketModel& model, const CorridorQuery& q) {
    const bool lower_open = std::isinf(q.lower);
    const bool upper_open = std::isinf(q.upper);
    if (lower_open && upper_open) {
        throw DomainError("survival_laplace: at most one corridor bound may be infinite");
    }
    if (lower_open) {
        return phi_plus_laplace(model, q.upper, q.x0, q.s);
    }
    if (upper_open) {
        return phi_minus_laplace(model, q.lower, q.x0, q.s);
    }
    return survival_corridor_laplace(model, q);
}

double phi_plus_laplace(const MarketModel& model, double k0_log, double x0, double s) {
    require_positive_s(s);
    if (x0 > k0_log) {
        throw DomainError("phi_plus_laplace: start must satisfy x0 <= ln(K0)");
    }
    return detail::phi_one_sided<double>(model.jumps.rho, model.jumps.gamma,
                                         exponential_rate(model), s, x0 - k0_log,
                                         Side::Up);
}

double phi_minus_laplace(const MarketModel& model, double k0_log, double x0, double s) {
    require_positive_s(s);
    if (x0 < k0_log) {
        throw DomainError("phi_minus_laplace: start must satisfy x0 >= ln(K0)");
    }
    return detail::phi_one_sided<double>(model.jumps.rho, model.jumps.gamma,
                                         exponential_rate(model), s, x0 - k0_log,
                                         Side::Down);
}

double wiener_phi(const WienerParams& params, double k0_log, double x0, double s,
                  Side side) {
    require_positive_s(s);
    if (!(params.sigma > 0.0)) {
        throw DomainError("wiener_phi: sigma must be positive");
    }
    if (side == Side::Up ? (x0 > k0_log) : (x0 < k0_log)) {
        throw DomainError("wiener_phi: start on the wrong side of the threshold");
    }
    const double var = params.sigma * params.sigma;
    const double root = std::sqrt(params.vartheta * params.vartheta + 2.0 * var * s);
    const double exponent = side == Side::Up ? (-params.vartheta + root) / var
                                             : (-params.vartheta - root) / var;
    return (1.0 - std::exp(exponent * (x0 - k0_log))) / s;
}

std::function<long double(long double)>
phi_transform_real(const MarketModel& model, double k0_log, double x0, Side side) {
    const double rho = model.jumps.rho;
    const double gamma = model.jumps.gamma;
    const double lambda = exponential_rate(model);
    if (side == Side::Up ? (x0 > k0_log) : (x0 < k0_log)) {
        throw DomainError("phi_transform_real: start on the wrong side of the threshold");
    }
    const double log_ratio = x0 - k0_log;
    return [=](long double s) {
        return detail::phi_one_sided<long double>(rho, gamma, lambda, s, log_ratio, side);
    };
}

std::function<std::complex<double>(std::complex<double>)>
phi_transform_complex(const MarketModel& model, double k0_log, double x0, Side side) {
    const double rho = model.jumps.rho;
    const double gamma = model.jumps.gamma;
    const double lambda = exponential_rate(model);
    if (side == Side::Up ? (x0 > k0_log) : (x0 < k0_log)) {
        throw DomainError("phi_transform_complex: start on the wrong side of the threshold");
    }
    const double log_ratio = x0 - k0_log;
    return [=](std::complex<double> s) {
        return detail::phi_one_sided<std::complex<double>>(rho, gamma, lambda, s,
                                                           log_ratio, side);
    };
}

} // namespace ctrw
