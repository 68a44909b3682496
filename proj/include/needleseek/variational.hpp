#pragma once

// Scalar state-transition values of the variational equation
//   v' = dF(x*(t)) u1(t) v
// along a stored trajectory x*. The log of Phi is tabulated once as a
// cumulative trapezoid sum on the trajectory grid, so every query is O(1).

#include <memory>
#include <optional>
#include <vector>

#include "needleseek/objective.hpp"
#include "needleseek/signals.hpp"
#include "needleseek/sim.hpp"

namespace needleseek {

class TransitionEvaluator {
public:
    /// `slope` is dF/dx. Without `u1` the integrand is dF(x*) alone.
    TransitionEvaluator(std::shared_ptr<const Trajectory> base, ScalarField slope,
                        std::optional<Signal> u1 = std::nullopt);
    TransitionEvaluator(std::shared_ptr<const Trajectory> base, const Objective& f,
                        std::optional<Signal> u1 = std::nullopt);

    /// Phi(t, t0) = exp(int_{t0}^{t} dF(x*) u1). Times are snapped to the
    /// nearest grid node; throws std::out_of_range outside the base or when
    /// the snap distance is not below h/2.
    [[nodiscard]] double stm(double t, double t0) const;

    /// Phi2(t, t0) = Phi(T - t, T - t0): the transition on the second half
    /// period, where u1 = -1 and x* retraces itself.
    [[nodiscard]] double stm_reflected(double t, double t0, double period) const;

    /// Transition under the square wave for 0 <= t, t0 <= T, composed from
    /// Phi on [0, T/2] and Phi2 on [T/2, T]. Only [0, T/2] of the base is used.
    [[nodiscard]] double stm_piecewise(double t, double t0, double period) const;

    /// Grid node for time t (same snapping rule as stm).
    [[nodiscard]] std::size_t node(double t) const;

    /// Cumulative log-transition: log Phi(t_k, t_0) = log_phi(k).
    [[nodiscard]] double log_phi(std::size_t k) const { return log_phi_[k]; }
    [[nodiscard]] double stm_nodes(std::size_t k, std::size_t k0) const;

    /// Integrand dF(x*(t_k)) u1(t_k) with the one-sided input value.
    [[nodiscard]] double integrand(std::size_t k, Side side) const;

    [[nodiscard]] const Trajectory& base() const noexcept { return *base_; }

private:
    std::shared_ptr<const Trajectory> base_;
    ScalarField slope_;
    std::optional<Signal> u1_;
    std::vector<double> log_phi_;
};

}  // namespace needleseek
