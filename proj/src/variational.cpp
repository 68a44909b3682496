#include "needleseek/variational.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace needleseek {

TransitionEvaluator::TransitionEvaluator(std::shared_ptr<const Trajectory> base, ScalarField slope,
                                         std::optional<Signal> u1)
    : base_(std::move(base)), slope_(std::move(slope)), u1_(std::move(u1)) {
    if (!base_ || base_->size() == 0) throw std::invalid_argument("transition evaluator needs a non-empty base");
    if (base_->dim() != 1) throw std::invalid_argument("transition evaluator needs a scalar trajectory");
    if (!slope_) throw std::invalid_argument("transition evaluator needs dF");

    const std::size_t n = base_->size();
    const double h = base_->step();
    log_phi_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        log_phi_[k + 1] = log_phi_[k] + 0.5 * h * (integrand(k, Side::right) + integrand(k + 1, Side::left));
    }
}

TransitionEvaluator::TransitionEvaluator(std::shared_ptr<const Trajectory> base, const Objective& f,
                                         std::optional<Signal> u1)
    : TransitionEvaluator(std::move(base), [f](double x) { return f.slope(x); }, std::move(u1)) {}

double TransitionEvaluator::integrand(std::size_t k, Side side) const {
    const double g = slope_((*base_)[k]);
    return u1_ ? g * u1_->value(base_->time(k), side) : g;
}

std::size_t TransitionEvaluator::node(double t) const {
    const double r = (t - base_->t0()) / base_->step();
    const double k = std::round(r);
    if (!(std::abs(r - k) < 0.5) || k < 0.0 || k > static_cast<double>(base_->size() - 1)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "time %.17g is outside the base trajectory [%.17g, %.17g]", t, base_->t0(),
                      base_->end_time());
        throw std::out_of_range(msg);
    }
    return static_cast<std::size_t>(k);
}

double TransitionEvaluator::stm_nodes(std::size_t k, std::size_t k0) const {
    return std::exp(log_phi_.at(k) - log_phi_.at(k0));
}

double TransitionEvaluator::stm(double t, double t0) const {
    return stm_nodes(node(t), node(t0));
}

double TransitionEvaluator::stm_reflected(double t, double t0, double period) const {
    return stm(period - t, period - t0);
}

double TransitionEvaluator::stm_piecewise(double t, double t0, double period) const {
    if (t < 0.0 || t > period || t0 < 0.0 || t0 > period) {
        throw std::out_of_range("stm_piecewise arguments must lie in [0, T]");
    }
    const double half = period / 2.0;
    const bool t_first = t <= half;
    const bool t0_first = t0 <= half;
    if (t_first && t0_first) return stm(t, t0);
    if (!t_first && !t0_first) return stm_reflected(t, t0, period);
    if (!t_first) return stm_reflected(t, half, period) * stm(half, t0);
    return stm(t, half) * stm_reflected(half, t0, period);
}

}  // namespace needleseek
