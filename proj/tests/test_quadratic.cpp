#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>
#include <numbers>
#include <random>

#include "needleseek/quadratic.hpp"
#include "needleseek/sim.hpp"
#include "needleseek/variational.hpp"

using namespace needleseek;

namespace {

const QuadraticCase kQ = quadratic_case(2.0, 3.0);

}  // namespace

TEST_CASE("case parameters") {
    CHECK(kQ.discriminant_positive);
    CHECK(kQ.p == doctest::Approx(std::sqrt(2.0)));
    CHECK(kQ.x_min() == -1.0);
    CHECK_FALSE(quadratic_case(2.0, 1.0).discriminant_positive);
    CHECK_FALSE(quadratic_case(2.0, 0.5).discriminant_positive);
    CHECK_THROWS_AS((void)xstar_closed_form(quadratic_case(2.0, 1.0), 0.1, 0, 0.0, 1.0, 0.01), UnsupportedCase);
}

TEST_CASE("closed-form x* at the reference parameters") {
    CHECK(xstar_closed_form(kQ, 1e-5, 0, -1.0, 1.3, 1e-5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(xstar_closed_form(kQ, 1.3 + 1e-5, 1, 0.4, 1.3, 1e-5) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(anchor_offset(kQ, 0, -1.0, 1.3, 1e-5) == -1e-5);
    CHECK(xstar_closed_form(kQ, 0.5, 0, -1.0, 1.3, 1e-5) == doctest::Approx(0.20842563879386877).epsilon(1e-12));
}

TEST_CASE("escape time and blow-up") {
    const double t_esc = escape_time(kQ, 0, -1.0, 1.3, 1e-5, 0.0);
    CHECK(t_esc == doctest::Approx(1.1107307345395916).epsilon(1e-12));
    // a later branch when the interval starts past the first pole
    CHECK(escape_time(kQ, 0, -1.0, 1.3, 1e-5, 1.2) == doctest::Approx(t_esc + std::numbers::pi / kQ.p));
    // T = 3 so that the window [0, T/2] reaches past t_esc
    CHECK(xstar_closed_form(kQ, t_esc - 1e-4, 0, -1.0, 3.0, 1e-5) > 1e3);
    CHECK_THROWS_AS((void)xstar_closed_form(kQ, 1.2, 0, -1.0, 3.0, 1e-5), EscapeError);
    CHECK_THROWS_AS((void)xstar_closed_form(kQ, 0.7, 0, -1.0, 1.3, 1e-5), std::invalid_argument);
}

TEST_CASE("closed-form transition") {
    CHECK(phi_closed_form(kQ, 0.3, 0.3, 0, 0.2, 1.3, 1e-5) == 1.0);
    const QuadraticCase unit = quadratic_case(0.0, 1.0);
    CHECK(unit.p == 1.0);
    CHECK(phi_closed_form(unit, std::numbers::pi / 4.0, 0.0, 0, 0.0, 2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("closed forms match simulation and numeric transition") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> bd(-3.0, 3.0), dd(0.5, 20.0), unit(0.0, 1.0);
    const double period = 1.0, eps = 1e-5, h = 1e-5;
    for (int i = 0; i < 10; ++i) {
        const double b = bd(rng);
        const double disc = dd(rng);
        const QuadraticCase q = quadratic_case(b, (disc + b * b) / 4.0);
        // start angle chosen so the half period stays clear of the pole
        const double hi = std::numbers::pi / 2.0 - q.p * (period / 2.0) - 0.3;
        const double theta0 = -1.0 + (hi + 1.0) * unit(rng);
        const double xj = 0.5 * (std::tan(theta0) * q.sqrt_disc - b);

        const Objective f = quadratic_objective(q.b, q.c);
        const SolverConfig cfg{Method::rk4, h, 1e6};
        auto base = std::make_shared<const Trajectory>(
            integrate_affine(f, Signal::constant(1.0), Signal::constant(0.0), xj, 0.49998, cfg, eps));
        REQUIRE(!base->terminated_early());
        const TransitionEvaluator ev(base, f);
        for (std::size_t k = 499; k < base->size(); k += 499) {
            const double t = base->time(k);
            const double closed = xstar_closed_form(q, t, 0, xj, period, eps);
            CHECK(std::abs(closed - (*base)[k]) <= 1e-6 * std::max(1.0, std::abs(closed)));
            CHECK(phi_closed_form(q, t, eps, 0, xj, period, eps) == doctest::Approx(ev.stm(t, eps)).epsilon(1e-6));
        }
    }
}

TEST_CASE("fixed points at the reference parameters") {
    const FixedPoints fp = fixed_points(kQ, 1.3, 1e-5, -10.0);
    CHECK(fp.x_bar_1 == doctest::Approx(-1.6999752354069546).epsilon(1e-12));
    CHECK(fp.x_bar_2 == doctest::Approx(1.8572439406906045).epsilon(1e-12));
    for (double x : {fp.x_bar_1, fp.x_bar_2}) {
        CHECK(std::abs(fixed_point_residual(kQ, 1.3, 1e-5, x)) < 1e-9);
        CHECK(std::abs(fixed_point_w_residual(kQ, 1.3, 1e-5, x)) < 1e-12);
        CHECK(std::abs(x - kQ.x_min()) > 0.1);
    }
    CHECK(fp.stability_1 == Stability::stable);
    CHECK(fp.stability_2 == Stability::unstable);

    const FixedPoints limit = fixed_points(kQ, 1.3, 0.0, -10.0);
    CHECK(limit.angle == doctest::Approx(std::sqrt(2.0) * 0.65));
    CHECK(limit.x_bar_1 == doctest::Approx(-1.7000001352345508).epsilon(1e-12));
    CHECK(limit.x_bar_2 == doctest::Approx(1.8571423051652056).epsilon(1e-12));
}

TEST_CASE("fixed-point roots against bisection on the residual") {
    // independent root finding on 1 - Phi(eps, T/2 - eps) near the first root
    double lo = -1.8, hi = -1.6;
    const double flo = fixed_point_residual(kQ, 1.3, 1e-5, lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((fixed_point_residual(kQ, 1.3, 1e-5, mid) > 0.0) == (flo > 0.0)) lo = mid; else hi = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(fixed_points(kQ, 1.3, 1e-5, -10.0).x_bar_1).epsilon(1e-12));
}

TEST_CASE("zero amplitude leaves no preferred direction") {
    const FixedPoints fp = fixed_points(kQ, 1.3, 1e-5, 0.0);
    CHECK(fp.stability_1 == Stability::undetermined);
    CHECK(fp.stability_2 == Stability::undetermined);
}

TEST_CASE("degenerate angle") {
    const double eps = 0.01;
    const double period = 2.0 * (std::numbers::pi / kQ.p + 2.0 * eps);
    CHECK_THROWS_AS((void)fixed_points(kQ, period, eps, 1.0), DegenerateAngle);
}

TEST_CASE("closed-form iteration") {
    const ClosedFormIteration still = iterate_closed_form(kQ, 1.3, 1e-5, 0.0, -0.3, 5);
    REQUIRE(still.values.size() == 5);
    for (double v : still.values) CHECK(v == -0.3);

    const double target = fixed_points(kQ, 1.3, 1e-5, -10.0).x_bar_1;
    const ClosedFormIteration run = iterate_closed_form(kQ, 1.3, 1e-5, -10.0, -1.0, 100000);
    REQUIRE(!run.aborted);
    double prev = -1.0;
    bool monotone = true;
    for (double v : run.values) {
        monotone = monotone && v < prev && v > target;
        prev = v;
    }
    CHECK(monotone);
    CHECK(std::abs(run.values.back() - target) < 1e-3);
}

TEST_CASE("closed-form iteration stops on escape") {
    const ClosedFormIteration run = iterate_closed_form(kQ, 1.3, 1e-5, -10.0, 1.9, 10);
    CHECK(run.aborted);
    CHECK(run.failed_period == 0);
    CHECK(run.values.empty());
    CHECK(run.error.find("escapes") != std::string::npos);
}
