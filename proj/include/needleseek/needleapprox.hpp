#pragma once

// First-order needle-variation estimates of the state after one period.
//
// two_needle_*   : square-wave u1 with a +alpha / -alpha needle pair.
// lie_bracket_*  : the same pair at T = 8 eps, second-order in eps.
// many_needles_* : arbitrary (u1, u2) with u2 replaced by N needles, and the
//                  N -> infinity double integral.
//
// Every integral runs on the grid of the underlying simulation, so the
// quadrature error is O(h^2) and stays well below the approximation error.

#include <optional>
#include <string>
#include <vector>

#include "needleseek/objective.hpp"
#include "needleseek/signals.hpp"
#include "needleseek/sim.hpp"

namespace needleseek {

/// value = base + first_order_term. `base` is x0 for the needle-pair
/// estimates and x*(T) for the many-needle estimates.
struct ApproxResult {
    double value = 0.0;
    double first_order_term = 0.0;
    double base = 0.0;
    double eval_time = 0.0;
};

[[nodiscard]] ApproxResult two_needle_estimate(const Objective& f, const NeedleSpec& spec, double x0,
                                               const SolverConfig& cfg);

struct IterationResult {
    std::vector<ApproxResult> steps;  // x(T), x(2T), ...
    bool aborted = false;
    int failed_period = -1;  // zero-based period index that failed
    std::string error;
};

/// k periods of two_needle_estimate, each re-anchoring x* at the current
/// iterate. An escape stops the run and keeps the periods computed so far.
[[nodiscard]] IterationResult two_needle_iterate(const Objective& f, const NeedleSpec& spec, double x0, int k,
                                                 const SolverConfig& cfg);

/// T = 8 eps: value = x0 + eps^2 alpha (dF(x*(4 eps)) + dF(x0)).
[[nodiscard]] ApproxResult lie_bracket_estimate(const Objective& f, double epsilon, double alpha, double x0,
                                                const SolverConfig& cfg);

/// x*(T) + (T/N) sum_i [int_{t_{i+1}}^T dF(x*) u1 Phi(tau, t_{i+1}) dtau + 1] u2(t_{i+1}),
/// u2 sampled as in needle_discretize. T/N must be a whole number of steps.
[[nodiscard]] ApproxResult many_needles_estimate(const Objective& f, const Signal& u1, const Signal& u2, int n,
                                                 double x0, const SolverConfig& cfg);

/// x*(T) + int_0^T int_t^T dF(x*) u1 Phi(tau, t) u2(t) dtau dt.
[[nodiscard]] ApproxResult many_needles_limit(const Objective& f, const Signal& u1, const Signal& u2, double x0,
                                              const SolverConfig& cfg);

}  // namespace needleseek
