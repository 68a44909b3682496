#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "needleseek/objective.hpp"

using namespace needleseek;

namespace {

// Analytic gradient against central differences, relative to max(1, |g|).
void check_against_fd(const Objective& f, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pick(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        State x(f.dim());
        for (double& v : x) v = pick(rng);
        const State g = f.gradient(x);
        State fd(f.dim());
        central_difference([&f](std::span<const double> p) { return f(p); }, x, fd);
        for (std::size_t j = 0; j < x.size(); ++j) {
            CHECK(std::abs(g[j] - fd[j]) <= 1e-5 * std::max(1.0, std::abs(g[j])));
        }
    }
}

}  // namespace

TEST_CASE("quadratic objective values") {
    const Objective f = quadratic_objective(2.0, 3.0);
    CHECK(f.dim() == 1);
    CHECK(f.grad_kind() == GradKind::analytic);
    CHECK(f.value(-1.0) == 2.0);
    CHECK(f.slope(-1.0) == 0.0);
    CHECK(quadratic_objective(0.0, 0.0).value(2.0) == 4.0);
    REQUIRE(f.minimum());
    CHECK(f.minimum()->argmin[0] == -1.0);
    CHECK(f.minimum()->value == 2.0);
}

TEST_CASE("gradient vanishes exactly at -b/2") {
    for (double b : {-3.7, 0.0, 1.25, 2.0, 9.5}) {
        CHECK(quadratic_objective(b, 1.0).slope(-b / 2.0) == 0.0);
    }
}

TEST_CASE("abs cubed objective") {
    const Objective f = abs_cubed_objective();
    CHECK(f.value(-2.0) == 8.0);
    CHECK(f.slope(0.0) == 0.0);
    CHECK(f.slope(-1.0) == -3.0);
    CHECK(f.minimum()->value == 0.0);
}

TEST_CASE("custom objectives fall back to central differences") {
    const Objective quartic = custom_objective(1, [](std::span<const double> x) { return std::pow(x[0], 4); });
    CHECK(quartic.grad_kind() == GradKind::central_difference);
    CHECK(quartic.slope(1.0) == doctest::Approx(4.0).epsilon(1e-5));

    const Objective bowl = custom_objective(2, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; });
    const State g = bowl.gradient(State{1.0, 1.0});
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-5));

    const Objective wave = custom_objective(1, [](std::span<const double> x) { return std::sin(x[0]); });
    CHECK(wave.slope(0.0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("custom objective rejects dimension zero") {
    CHECK_THROWS_AS((void)custom_objective(0, [](std::span<const double>) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("scalar shorthands need a scalar objective") {
    const Objective bowl = custom_objective(2, [](std::span<const double> x) { return x[0] * x[1]; });
    CHECK_THROWS_AS((void)bowl.value(1.0), std::logic_error);
    CHECK_THROWS_AS((void)bowl.slope(1.0), std::logic_error);
}

TEST_CASE("builtin gradients agree with central differences") {
    std::mt19937_64 rng(20261017);
    check_against_fd(quadratic_objective(2.0, 3.0), rng);
    check_against_fd(quadratic_objective(-4.5, 0.25), rng);
    check_against_fd(abs_cubed_objective(), rng);
}
