#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>
#include <random>

#include "needleseek/quadratic.hpp"
#include "needleseek/variational.hpp"

using namespace needleseek;

namespace {

const NeedleSpec kFig{1.3, 1e-5, -10.0};

std::shared_ptr<const Trajectory> share(Trajectory tr) {
    return std::make_shared<const Trajectory>(std::move(tr));
}

// Direct oracle: integrate (x, v) with the square wave from t0 to t, one
// half-period at a time so no RK stage straddles the switch.
double direct_transition(const Objective& f, const Trajectory& first_half, double period, double h, double t,
                         double t0) {
    if (t < t0) return 1.0 / direct_transition(f, first_half, period, h, t0, t);
    if (t == t0) return 1.0;
    const double half = period / 2.0;
    // x*(t0) from the stored first half and the reflection x*(t) = x*(T - t)
    const double s = t0 <= half ? t0 : period - t0;
    double x = first_half[static_cast<std::size_t>(std::llround(s / h))];
    double v = 1.0;
    double a = t0;
    while (a < t - 1e-12) {
        const double sign = a < half - 1e-12 ? 1.0 : -1.0;
        const double b = sign > 0.0 ? std::min(t, half) : t;
        const SolverConfig cfg{Method::rk4, h, 1e6};
        const Trajectory seg = integrate_ode(
            [&f, sign](double, std::span<const double> z, std::span<double> dz) {
                dz[0] = sign * f.value(z[0]);
                dz[1] = sign * f.slope(z[0]) * z[1];
            },
            State{x, v}, b - a, cfg);
        x = seg.back()[0];
        v = seg.back()[1];
        a = b;
    }
    return v;
}

}  // namespace

TEST_CASE("empty interval gives one") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const auto base = share(unperturbed_solution(f, kFig, -1.0, 1, SolverConfig{Method::rk4, 1e-3, 1e6}));
    const TransitionEvaluator ev(base, f);
    CHECK(ev.stm(0.4, 0.4) == 1.0);
    CHECK(ev.stm_reflected(0.9, 0.9, 1.3) == 1.0);
    CHECK(ev.stm_piecewise(1.0, 1.0, 1.3) == 1.0);
}

TEST_CASE("flat base has unit transition") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const SolverConfig cfg{Method::rk4, 1e-2, 1e6};
    const auto base = share(integrate_affine(f, Signal::constant(0.0), Signal::constant(0.0), -1.0, 2.0, cfg));
    const TransitionEvaluator ev(base, f);
    CHECK(ev.stm(1.0, 0.0) == 1.0);
    for (double t : {0.3, 0.8, 1.1}) {
        for (double t0 : {0.0, 0.5, 1.2}) CHECK(ev.stm_reflected(t, t0, 2.0) == ev.stm(t, t0));
    }
}

TEST_CASE("tangent base") {
    // x* = tan t, dF = 2 tan t, Phi(1, 0) = 1 / cos^2(1)
    const Objective f = quadratic_objective(0.0, 1.0);
    const SolverConfig cfg{Method::rk4, 1e-4, 1e6};
    const auto base = share(integrate_affine(f, Signal::constant(1.0), Signal::constant(0.0), 0.0, 1.0, cfg));
    const TransitionEvaluator ev(base, f);
    CHECK(ev.stm(1.0, 0.0) == doctest::Approx(3.425518820814759).epsilon(1e-5));
    CHECK(ev.stm(0.0, 1.0) == doctest::Approx(1.0 / 3.425518820814759).epsilon(1e-5));
}

TEST_CASE("cocycle and positivity") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const auto base = share(unperturbed_solution(f, kFig, -1.0, 1, SolverConfig{Method::rk4, 1e-4, 1e6}));
    const TransitionEvaluator ev(base, f, two_needle_u1(kFig));
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> node(0, 13000);
    for (int i = 0; i < 200; ++i) {
        const double t0 = node(rng) * 1e-4, t1 = node(rng) * 1e-4, t2 = node(rng) * 1e-4;
        const double direct = ev.stm(t2, t0);
        CHECK(direct > 0.0);
        CHECK(direct == doctest::Approx(ev.stm(t2, t1) * ev.stm(t1, t0)).epsilon(1e-9));
        CHECK(ev.stm(t0, t2) == doctest::Approx(1.0 / direct).epsilon(1e-12));
    }
}

TEST_CASE("queries outside the base are rejected") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const SolverConfig cfg{Method::rk4, 1e-2, 1e6};
    const auto base = share(integrate_affine(f, Signal::constant(1.0), Signal::constant(0.0), -1.0, 0.5, cfg));
    const TransitionEvaluator ev(base, f);
    CHECK_THROWS_AS((void)ev.stm(0.6, 0.0), std::out_of_range);
    CHECK_THROWS_AS((void)ev.stm(0.1, -0.1), std::out_of_range);
    CHECK_THROWS_AS((void)ev.stm_piecewise(1.1, 0.0, 1.0), std::out_of_range);
    CHECK_NOTHROW((void)ev.stm(0.5 + 0.004, 0.0));
}

TEST_CASE("piecewise branches") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const double h = 1e-4;
    const double period = 1.3;
    const auto half = share(integrate_affine(f, Signal::constant(1.0), Signal::constant(0.0), -1.0, 0.65,
                                             SolverConfig{Method::rk4, h, 1e6}));
    const TransitionEvaluator ev(half, f);

    CHECK(ev.stm_piecewise(0.5, 0.1, period) == ev.stm(0.5, 0.1));
    CHECK(ev.stm_piecewise(1.3, 0.0, period) ==
          doctest::Approx(ev.stm_reflected(1.3, 0.65, period) * ev.stm(0.65, 0.0)).epsilon(1e-12));
    // over a whole period the square wave undoes itself
    CHECK(ev.stm_piecewise(1.3, 0.0, period) == doctest::Approx(1.0).epsilon(1e-12));

    const double oracle = direct_transition(f, *half, period, h, 1.3, 0.0);
    CHECK(ev.stm_piecewise(1.3, 0.0, period) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("piecewise transition agrees with the variational ode") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const double h = 1e-4;
    const double period = 1.3;
    const auto half = share(integrate_affine(f, Signal::constant(1.0), Signal::constant(0.0), -1.0, 0.65,
                                             SolverConfig{Method::rk4, h, 1e6}));
    const TransitionEvaluator ev(half, f);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> node(0, 13000);
    for (int i = 0; i < 50; ++i) {
        const double t = node(rng) * h, t0 = node(rng) * h;
        const double oracle = direct_transition(f, *half, period, h, t, t0);
        CHECK(ev.stm_piecewise(t, t0, period) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("first half-period matches the closed form") {
    const Objective f = quadratic_objective(2.0, 3.0);
    const QuadraticCase q = quadratic_case(2.0, 3.0);
    const double eps = 1e-5;
    const SolverConfig cfg{Method::rk4, 1e-5, 1e6};
    const auto base =
        share(integrate_affine(f, Signal::constant(1.0), Signal::constant(0.0), -1.0, 0.6, cfg, eps));
    const TransitionEvaluator ev(base, f);
    CHECK(ev.stm(0.5, eps) == doctest::Approx(phi_closed_form(q, 0.5, eps, 0, -1.0, 1.3, eps)).epsilon(1e-6));
    for (double t : {0.1, 0.25, 0.4, 0.6}) {
        CHECK(ev.stm(t, eps) == doctest::Approx(phi_closed_form(q, t, eps, 0, -1.0, 1.3, eps)).epsilon(1e-6));
    }
}
