// Acceptance suite: end-to-end checks of the closed forms against the Monte
// Carlo oracle, the Black-Scholes limit, and the inversion cross-checks.
// Prints one PASS/FAIL line per criterion; exit code 0 only if all hold.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ctrw/laplace.hpp"
#include "ctrw/mc.hpp"
#include "ctrw/pricing.hpp"
#include "ctrw/process.hpp"
#include "ctrw/rng.hpp"
#include "ctrw/survival.hpp"

using namespace ctrw;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::ostringstream&)> check;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

MarketModel reference_model(double spot) {
    return MarketModel::risk_neutral(JumpLaw(2.0, 3.0), 0.05, spot);
}

// 1. Martingale reproduction: lambda = 0.1 from the constraint; MC mean of
//    S(t) e^{-rt}/S0 at t in {1,5} within 4 stderr at 1e5 paths; < 10 s.
bool criterion_martingale(std::ostringstream& detail) {
    const auto start = std::chrono::steady_clock::now();
    const double lambda = martingale_rate(JumpLaw(2.0, 3.0), 0.05);
    bool ok = std::abs(lambda - 0.1) <= 1e-12 * 0.1;

    mc::SimulationPlan plan{
        .model = reference_model(1.0),
        .estimator = mc::MartingaleCheck{{1.0, 5.0}},
        .n_paths = 100'000,
        .seed = 42,
    };
    double z_max = 0.0;
    for (const mc::McEstimate& est : mc::run(plan)) {
        z_max = std::max(z_max, std::abs(est.mean - 1.0) / est.std_error);
    }
    const double elapsed = seconds_since(start);
    ok = ok && z_max <= 4.0 && elapsed < 10.0;
    detail << "lambda=" << lambda << " z_max=" << z_max << " runtime=" << elapsed
           << "s";
    return ok;
}

// 2. Binary prices vs MC (3 stderr at 1e6 paths) and vs 1 - r Phi (1e-12).
bool criterion_binary(std::ostringstream& detail) {
    const MarketModel call_model = reference_model(1.0);
    const PriceResult call = binary_price(call_model, OptionSpec::binary_call(2.0));
    const double call_dual =
        binary_price_via_survival(call_model, OptionSpec::binary_call(2.0));

    const MarketModel put_model = reference_model(2.0);
    const PriceResult put = binary_price(put_model, OptionSpec::binary_put(1.0));
    const double put_dual =
        binary_price_via_survival(put_model, OptionSpec::binary_put(1.0));

    bool ok = std::abs(call.price - 0.25) <= 1e-12
              && std::abs(put.price - 1.0 / 12.0) <= 1e-12
              && std::abs(call.price - call_dual) <= 1e-12
              && std::abs(put.price - put_dual) <= 1e-12;

    mc::SimulationPlan up{
        .model = call_model,
        .estimator = mc::DiscountedCrossing{0.05},
        .barrier = mc::Barrier{std::nullopt, std::log(2.0)},
        .n_paths = 1'000'000,
        .seed = 42,
    };
    const mc::McEstimate up_est = mc::run_scalar(up);
    const double z_up = std::abs(up_est.mean - call.price) / up_est.std_error;

    mc::SimulationPlan down{
        .model = put_model,
        .estimator = mc::DiscountedCrossing{0.05},
        .barrier = mc::Barrier{0.0, std::nullopt},
        .n_paths = 1'000'000,
        .seed = 42,
    };
    const mc::McEstimate down_est = mc::run_scalar(down);
    const double z_down = std::abs(down_est.mean - put.price) / down_est.std_error;

    ok = ok && z_up <= 3.0 && z_down <= 3.0;
    detail << "D+=" << call.price << " z=" << z_up << "; D-=" << put.price
           << " z=" << z_down << "; dual gaps " << std::abs(call.price - call_dual)
           << ", " << std::abs(put.price - put_dual);
    return ok;
}

// 3. Vanilla put: boundary and price to 1e-12, MC to 3 stderr, continuity.
bool criterion_vanilla_put(std::ostringstream& detail) {
    const MarketModel model = reference_model(1.0);
    const OptionSpec put = OptionSpec::vanilla_put(1.0);
    const PriceResult res = vanilla_put_price(model, put);
    bool ok = std::abs(*res.boundary - 8.0 / 9.0) <= 1e-12
              && std::abs(res.price - 64.0 / 729.0) <= 1e-12;

    const MarketModel at_boundary = reference_model(8.0 / 9.0);
    const double continuity =
        std::abs(vanilla_put_price(at_boundary, put).price - (1.0 - 8.0 / 9.0));
    ok = ok && continuity < 1e-12;

    mc::SimulationPlan plan{
        .model = model,
        .estimator = mc::DiscountedPayoff{put, *res.boundary},
        .n_paths = 1'000'000,
        .seed = 42,
    };
    const mc::McEstimate est = mc::run_scalar(plan);
    const double z = std::abs(est.mean - res.price) / est.std_error;
    ok = ok && z <= 3.0;
    detail << "H=" << *res.boundary << " V=" << res.price << " z=" << z
           << " continuity=" << continuity;
    return ok;
}

// 4. Never-exercised call: no root of the boundary condition, price = S0.
bool criterion_call_never(std::ostringstream& detail) {
    const double rho = 2.0, strike = 1.0;
    double min_gap = 1e300;
    bool sign_change = false;
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double h = strike * (1.1 + (10.0 - 1.1) * i / 1000.0);
        // Candidate live value at its own boundary minus the exercise payoff.
        const double gap = (h - (rho - 1.0) / rho * strike) - (h - strike);
        min_gap = std::min(min_gap, std::abs(gap));
        sign_change = sign_change || (i > 0 && gap * prev < 0.0);
        prev = gap;
    }
    bool ok = !sign_change && min_gap > 0.0;
    for (double spot : {0.2, 1.0, 7.0}) {
        const PriceResult res =
            vanilla_call_price(reference_model(spot), OptionSpec::vanilla_call(1.0));
        ok = ok && res.price == spot && res.regime == ExerciseRegime::Never;
    }
    detail << "min |smooth-fit gap| over scan = " << min_gap << ", sign change: "
           << (sign_change ? "yes" : "no");
    return ok;
}

// 5. Fig. 2 convergence toward the Black-Scholes perpetual put.
bool criterion_fig2(std::ostringstream& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> grid;
    for (int i = 0; i < 66; ++i) {
        grid.push_back(0.85 + (1.5 - 0.85) * i / 65.0);
    }
    const std::vector<double> rhos{2.0, 5.0, 20.0, 100.0, 1000.0};
    const auto rows = convergence_table(0.05, 0.1, rhos, grid);

    std::vector<double> max_gap(rhos.size(), 0.0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            if (row.rho == rhos[i]) {
                max_gap[i] = std::max(max_gap[i], std::abs(row.v_ctrw - row.v_bs));
            }
        }
    }
    bool monotone = true;
    for (std::size_t i = 1; i < max_gap.size(); ++i) {
        monotone = monotone && max_gap[i] < max_gap[i - 1];
    }

    double tail_gap = 0.0;
    for (const auto& row : convergence_table(0.05, 0.1, {1e4}, grid)) {
        tail_gap = std::max(tail_gap, std::abs(row.v_ctrw - row.v_bs));
    }
    const double bs_atm = bs_limit_price(0.05, 0.1, OptionSpec::vanilla_put(1.0), 1.0).price;
    const double elapsed = seconds_since(start);

    const bool ok = monotone && tail_gap < 1e-3 && std::abs(bs_atm - 0.035049) < 1e-6
                    && elapsed < 1.0;
    detail << "max gaps ";
    for (double g : max_gap) {
        detail << g << ' ';
    }
    detail << "| rho=1e4 gap=" << tail_gap << " runtime=" << elapsed << "s";
    return ok;
}

// 6. Survival / inversion / MC triangle plus Gaver-Stehfest vs Talbot.
bool criterion_survival_triangle(std::ostringstream& detail) {
    const MarketModel model = reference_model(1.0);
    const double k0_log = std::log(2.0);
    const auto gs_eval = phi_transform_real(model, k0_log, 0.0, Side::Up);
    const auto talbot_eval = phi_transform_complex(model, k0_log, 0.0, Side::Up);

    mc::SimulationPlan plan{
        .model = model,
        .estimator = mc::SurvivalAtTimes{{1.0, 10.0, 100.0}},
        .barrier = mc::Barrier{std::nullopt, k0_log},
        .n_paths = 1'000'000,
        .seed = 42,
    };
    const auto estimates = mc::run(plan);

    bool ok = true;
    const double times[] = {1.0, 10.0, 100.0};
    for (std::size_t i = 0; i < 3; ++i) {
        const SurvivalValue gs = invert_survival(gs_eval, times[i]);
        const double talbot = invert_laplace_talbot(talbot_eval, times[i]);
        const double z = std::abs(estimates[i].mean - gs.value) / estimates[i].std_error;
        const double method_gap = std::abs(gs.value - talbot);
        ok = ok && z <= 3.0 && method_gap <= 1e-6;
        detail << "t=" << times[i] << " z=" << z << " |gs-talbot|=" << method_gap
               << "; ";
    }
    return ok;
}

// 7. Property suites: exponent identities, floors, monotonicity, overshoot
//    KS, scale invariance.
bool criterion_properties(std::ostringstream& detail) {
    bool ok = true;

    // Exponent identities over 1e3 random draws.
    CounterRng rng(20260811, 0);
    double worst_identity = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double rho = 0.2 + 8.0 * rng.next_uniform();
        const double gamma = 0.2 + 8.0 * rng.next_uniform();
        const double psi = rng.next_uniform();
        const Auxiliaries aux = auxiliaries(JumpLaw(rho, gamma), psi);
        worst_identity = std::max(
            worst_identity,
            std::abs(aux.alpha + aux.beta - (rho - gamma)) / (rho + gamma));
        worst_identity = std::max(
            worst_identity,
            std::abs(aux.alpha * aux.beta + gamma * rho * (1.0 - psi)) / (gamma * rho));
    }
    ok = ok && worst_identity <= 1e-12;

    // No-arbitrage floor and monotonicity grids.
    const OptionSpec put = OptionSpec::vanilla_put(1.0);
    const OptionSpec bcall = OptionSpec::binary_call(2.0);
    double prev_put = 1e300, prev_bin = -1.0;
    bool floors = true, monotone = true;
    for (int i = 0; i < 200; ++i) {
        const double spot = 0.05 + 10.0 * i / 199.0;
        const MarketModel m = reference_model(spot);
        floors = floors && vanilla_put_price(m, put).price >= put.intrinsic(spot) - 1e-15
                 && binary_price(m, bcall).price >= bcall.intrinsic(spot) - 1e-15;

        const double s_put = 8.0 / 9.0 + (10.0 - 8.0 / 9.0) * i / 199.0;
        const double v = vanilla_put_price(reference_model(s_put), put).price;
        monotone = monotone && v < prev_put;
        prev_put = v;

        const double s_bin = 2.0 * (i + 1) / 200.0;
        const double d = binary_price(reference_model(s_bin), bcall).price;
        monotone = monotone && d > prev_bin;
        prev_bin = d;
    }
    ok = ok && floors && monotone;

    // Overshoot KS at 1e5 crossings.
    mc::SimulationPlan crossing{
        .model = reference_model(1.0),
        .estimator = mc::DiscountedCrossing{0.05},
        .barrier = mc::Barrier{std::nullopt, std::log(2.0)},
        .n_paths = 110'000,
        .seed = 42,
    };
    const mc::OvershootStats overshoot = mc::overshoot_distribution(crossing);
    ok = ok && overshoot.n_crossings >= 100'000 && overshoot.ks_p_value > 0.01;

    // Scale invariance under joint rescaling by 7.3.
    double worst_scale = 0.0;
    for (double spot : {0.9, 1.0, 2.0}) {
        const double v1 = vanilla_put_price(reference_model(spot), put).price;
        const double v2 = vanilla_put_price(reference_model(7.3 * spot),
                                            OptionSpec::vanilla_put(7.3)).price;
        worst_scale = std::max(worst_scale, std::abs(v2 - 7.3 * v1) / (7.3 * v1));
        const double b1 = binary_price(reference_model(spot), bcall).price;
        const double b2 = binary_price(reference_model(7.3 * spot),
                                       OptionSpec::binary_call(7.3 * 2.0)).price;
        worst_scale = std::max(worst_scale, std::abs(b2 - b1) / b1);
    }
    ok = ok && worst_scale <= 1e-12;

    detail << "identity<=" << worst_identity << " floors=" << (floors ? "ok" : "BAD")
           << " monotone=" << (monotone ? "ok" : "BAD")
           << " ks_p=" << overshoot.ks_p_value << " (n=" << overshoot.n_crossings
           << ") scale<=" << worst_scale;
    return ok;
}

// 8. Negative test: a two-point waiting mixture breaks the martingale.
bool criterion_negative(std::ostringstream& detail) {
    const MarketModel model = MarketModel::physical(
        JumpLaw(2.0, 3.0), WaitingLaw::two_point_mixture(5.0, 15.0, 0.5), 0.05, 1.0);
    mc::SimulationPlan plan{
        .model = model,
        .estimator = mc::MartingaleCheck{{1.0, 5.0, 20.0}},
        .n_paths = 100'000,
        .seed = 42,
    };
    double z_max = 0.0;
    for (const mc::McEstimate& est : mc::run(plan)) {
        if (est.std_error > 0.0) {
            z_max = std::max(z_max, std::abs(est.mean - 1.0) / est.std_error);
        } else if (est.mean != 1.0) {
            z_max = std::numeric_limits<double>::infinity();
        }
    }
    detail << "max |mean-1|/stderr = " << z_max;
    return z_max > 5.0;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"martingale reproduction", criterion_martingale},
        {"binary prices", criterion_binary},
        {"vanilla put", criterion_vanilla_put},
        {"never-exercised call", criterion_call_never},
        {"fig2 convergence", criterion_fig2},
        {"survival/inversion/MC triangle", criterion_survival_triangle},
        {"property suites", criterion_properties},
        {"negative test (non-exponential waits)", criterion_negative},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::ostringstream detail;
        bool pass = false;
        try {
            pass = criteria[i].check(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        std::printf("[%zu] %-40s %s  (%s)\n", i + 1, criteria[i].name.c_str(),
                    pass ? "PASS" : "FAIL", detail.str().c_str());
        failures += pass ? 0 : 1;
    }
    std::printf("%d/%zu acceptance criteria passed\n", int(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
