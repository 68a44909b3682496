#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <string>
#include <vector>

#include "needleseek/signals.hpp"

using namespace needleseek;

namespace {

const NeedleSpec kFig{1.3, 1e-5, -10.0};

std::vector<Signal> builtins() {
    auto [tc, ts] = trig_pair(2.0);
    auto [r1, r2] = smooth_root_pair(1.0, 3);
    return {two_needle_u1(kFig), two_needle_u2(kFig), tc, ts, r1, r2};
}

}  // namespace

TEST_CASE("square wave u1") {
    const Signal u1 = two_needle_u1(kFig);
    CHECK(u1(0.1) == 1.0);
    CHECK(u1(0.7) == -1.0);
    CHECK(u1(1.4) == 1.0);
    CHECK(u1(0.65) == -1.0);
    CHECK(u1.value(0.65, Side::left) == 1.0);
    CHECK(u1.value(1.3, Side::left) == -1.0);
    CHECK(u1.value(1.3, Side::right) == 1.0);
}

TEST_CASE("two-needle u2") {
    const Signal u2 = two_needle_u2(kFig);
    CHECK(u2(5e-6) == -10.0);
    CHECK(u2(0.3) == 0.0);
    CHECK(u2(0.65 + 5e-6) == 10.0);
    CHECK(u2(1e-5) == 0.0);
    CHECK(u2.value(1e-5, Side::left) == -10.0);
    CHECK(u2.bound() == 10.0);
}

TEST_CASE("grid times a few ulps off a breakpoint snap onto it") {
    const double h = 5e-7;
    const Signal u2 = two_needle_u2(kFig);
    CHECK(u2(20 * h) == 0.0);
    CHECK(u2.value(20 * h, Side::left) == -10.0);
    CHECK(u2(1300000 * h) == 10.0);
}

TEST_CASE("needle spec validation names the constraint") {
    const NeedleSpec bad{1.0, 0.6, 1.0};
    try {
        bad.validate();
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("epsilon < T/2") != std::string::npos);
    }
    CHECK_THROWS_AS(NeedleSpec({-1.0, 0.1, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(NeedleSpec({1.0, 0.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("trigonometric pair") {
    auto [c, s] = trig_pair(2.0 * std::numbers::pi);
    CHECK(c(0.0) == doctest::Approx(1.0));
    CHECK(s(0.0) == 0.0);
    auto [c4, s4] = trig_pair(std::numbers::pi / 2.0);
    CHECK(c4(0.0) == doctest::Approx(2.0));
}

TEST_CASE("smooth root pair") {
    auto [r, p] = smooth_root_pair(1.0, 1);
    CHECK(r(0.25) == doctest::Approx(1.0));
    CHECK(p(0.0) == doctest::Approx(1.0));
    auto [r10, p10] = smooth_root_pair(1.0, 10);
    CHECK(std::abs(p10(0.25)) < 1e-12);
    CHECK(r(0.75) == doctest::Approx(-1.0));
}

TEST_CASE("builtins are periodic and bounded") {
    for (const Signal& s : builtins()) {
        const double period = s.period();
        for (int i = 0; i < 997; ++i) {
            const double t = period * i / 997.0 + 1e-4;
            CHECK(std::abs(s(t + period) - s(t)) <= 1e-12);
            CHECK(std::abs(s(t)) <= s.bound() + 1e-12);
        }
    }
}

TEST_CASE("builtins have zero mean") {
    for (const Signal& s : builtins()) {
        CHECK(std::abs(period_mean(s, 20000)) < 1e-10);
    }
}

TEST_CASE("two-needle u2 integrates to zero exactly") {
    const NeedleSpec spec{1.0, 0.125, 3.0};
    const Signal u2 = two_needle_u2(spec);
    CHECK(period_mean(u2, 64) == 0.0);
}

TEST_CASE("needle discretization samples the right endpoint") {
    const Signal zero = Signal::constant(0.0, 1.0);
    const Signal dz = needle_discretize(zero, 7);
    for (double t : {0.0, 0.3, 0.99}) CHECK(dz(t) == 0.0);

    const Signal ramp = custom_signal(1.0, 1.0, [](double t) { return t; });
    CHECK(needle_discretize(ramp, 2)(0.25) == 0.5);

    auto [c, s] = trig_pair(2.0 * std::numbers::pi);
    CHECK(needle_discretize(s, 4)(0.1) == doctest::Approx(1.0));
    CHECK(needle_discretize(s, 4).kind() == SignalKind::needle_discretized);
}

TEST_CASE("needle discretization keeps a needle that ends on the grid") {
    const NeedleSpec spec{1.0, 0.25, 2.0};
    const Signal d = needle_discretize(two_needle_u2(spec), 4);
    CHECK(d(0.1) == 2.0);
    CHECK(d(0.3) == 0.0);
    CHECK(d(0.6) == -2.0);
    CHECK(d(0.8) == 0.0);
}

TEST_CASE("needle discretization converges for the trig pair") {
    auto [c, s] = trig_pair(1.0);
    for (const Signal& sig : {c, s}) {
        double prev = 1e300;
        for (int n : {8, 32, 128}) {
            const Signal d = needle_discretize(sig, n);
            double dev = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double t = (i + 0.37) / 1000.0;
                dev = std::max(dev, std::abs(d(t) - sig(t)));
            }
            CHECK(dev < prev);
            prev = dev;
        }
    }
}

TEST_CASE("piecewise construction is checked") {
    CHECK_THROWS_AS(Signal::piecewise(SignalKind::custom, 1.0, {0.1}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Signal::piecewise(SignalKind::custom, 1.0, {0.0, 0.5, 0.4}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Signal::piecewise(SignalKind::custom, 1.0, {0.0, 1.0}, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS((void)needle_discretize(Signal::constant(1.0), 0), std::invalid_argument);
}
