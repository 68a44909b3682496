#include "needleseek/needleapprox.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "needleseek/variational.hpp"

namespace needleseek {

namespace {

std::shared_ptr<const Trajectory> unperturbed(const Objective& f, const Signal& u1, double x0, double horizon,
                                              const SolverConfig& cfg) {
    const Signal zero = Signal::constant(0.0, u1.period());
    auto traj = std::make_shared<const Trajectory>(integrate_affine(f, u1, zero, x0, horizon, cfg));
    if (traj->terminated_early()) {
        throw EscapeError("unperturbed solution does not exist on the required interval: " +
                              traj->termination_reason(),
                          traj->end_time());
    }
    return traj;
}

// inner[k] = int_{t_k}^{T} dF(x*) u1 Phi(tau, t_k) dtau, by trapezoid on the
// grid. Phi(tau, t_k) = exp(C(tau) - C(t_k)), so the integral is a suffix sum
// of g e^C scaled by e^{-C(t_k)}; C is shifted by its maximum to keep the
// exponentials in range.
std::vector<double> inner_integrals(const TransitionEvaluator& ev) {
    const std::size_t n = ev.base().size();
    const double h = ev.base().step();
    double c_max = ev.log_phi(0);
    for (std::size_t k = 1; k < n; ++k) c_max = std::max(c_max, ev.log_phi(k));

    std::vector<double> inner(n, 0.0);
    double suffix = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
        const double left = ev.integrand(k, Side::right) * std::exp(ev.log_phi(k) - c_max);
        const double right = ev.integrand(k + 1, Side::left) * std::exp(ev.log_phi(k + 1) - c_max);
        suffix += 0.5 * h * (left + right);
        inner[k] = suffix * std::exp(c_max - ev.log_phi(k));
    }
    return inner;
}

void require_same_period(const Signal& u1, const Signal& u2) {
    if (std::abs(u1.period() - u2.period()) > 1e-12 * u1.period()) {
        throw std::invalid_argument("u1 and u2 must share the same period");
    }
}

}  // namespace

ApproxResult two_needle_estimate(const Objective& f, const NeedleSpec& spec, double x0, const SolverConfig& cfg) {
    spec.validate();
    cfg.validate();
    check_alignment(two_needle_u2(spec), cfg.step);

    const double half = spec.period / 2.0;
    auto traj = unperturbed(f, two_needle_u1(spec), x0, half, cfg);
    // u1 = +1 throughout [0, T/2], so no input enters the integrand.
    const TransitionEvaluator ev(traj, f);

    const std::size_t i1 = ev.node(spec.epsilon);
    const std::size_t i2 = ev.node(half - spec.epsilon);
    if (i2 < i1) {
        throw std::invalid_argument("two_needle_estimate: integration bounds invert (epsilon > T/4)");
    }
    const double h = cfg.step;
    double integral = 0.0;
    for (std::size_t k = i1; k < i2; ++k) {
        integral += 0.5 * h * (ev.integrand(k, Side::right) * ev.stm_nodes(k, i2) +
                               ev.integrand(k + 1, Side::left) * ev.stm_nodes(k + 1, i2));
    }
    const double first = spec.epsilon * spec.alpha * ev.stm_nodes(0, i1) * integral;
    return {x0 + first, first, x0, spec.period};
}

IterationResult two_needle_iterate(const Objective& f, const NeedleSpec& spec, double x0, int k,
                                   const SolverConfig& cfg) {
    if (k < 1) throw std::invalid_argument("two_needle_iterate: k must be >= 1");
    IterationResult out;
    out.steps.reserve(static_cast<std::size_t>(k));
    double x = x0;
    for (int j = 0; j < k; ++j) {
        try {
            ApproxResult r = two_needle_estimate(f, spec, x, cfg);
            if (!std::isfinite(r.value)) throw EscapeError("non-finite iterate", (j + 1) * spec.period);
            r.eval_time = (j + 1) * spec.period;
            x = r.value;
            out.steps.push_back(r);
        } catch (const EscapeError& e) {
            out.aborted = true;
            out.failed_period = j;
            out.error = "period " + std::to_string(j) + ": " + e.what();
            break;
        }
    }
    return out;
}

ApproxResult lie_bracket_estimate(const Objective& f, double epsilon, double alpha, double x0,
                                  const SolverConfig& cfg) {
    const NeedleSpec spec{8.0 * epsilon, epsilon, alpha};
    spec.validate();
    cfg.validate();
    auto traj = unperturbed(f, two_needle_u1(spec), x0, 4.0 * epsilon, cfg);
    const double x_half = (*traj)[traj->size() - 1];
    const double first = epsilon * epsilon * alpha * (f.slope(x_half) + f.slope(x0));
    return {x0 + first, first, x0, spec.period};
}

ApproxResult many_needles_estimate(const Objective& f, const Signal& u1, const Signal& u2, int n, double x0,
                                   const SolverConfig& cfg) {
    if (n < 1) throw std::invalid_argument("many_needles_estimate: N must be >= 1");
    require_same_period(u1, u2);
    cfg.validate();
    const double period = u1.period();
    const double width = period / n;
    const double r = width / cfg.step;
    if (std::abs(r - std::round(r)) > 1e-6 || std::round(r) < 1.0) {
        throw AlignmentError("many_needles_estimate: T/N must be a whole number of solver steps");
    }
    const auto m = static_cast<std::size_t>(std::round(r));

    auto traj = unperturbed(f, u1, x0, period, cfg);
    const TransitionEvaluator ev(traj, f, u1);
    const std::vector<double> inner = inner_integrals(ev);

    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i + 1) * m;
        sum += (inner[k] + 1.0) * u2.value((i + 1) * width, Side::left);
    }
    const double x_end = (*traj)[traj->size() - 1];
    const double first = width * sum;
    return {x_end + first, first, x_end, period};
}

ApproxResult many_needles_limit(const Objective& f, const Signal& u1, const Signal& u2, double x0,
                                const SolverConfig& cfg) {
    require_same_period(u1, u2);
    cfg.validate();
    if (u2.breakpoints().size() > 1) check_alignment(u2, cfg.step);
    const double period = u1.period();

    auto traj = unperturbed(f, u1, x0, period, cfg);
    const TransitionEvaluator ev(traj, f, u1);
    const std::vector<double> inner = inner_integrals(ev);

    const double h = cfg.step;
    double outer = 0.0;
    for (std::size_t k = 0; k + 1 < traj->size(); ++k) {
        outer += 0.5 * h * (inner[k] * u2.value(traj->time(k), Side::right) +
                            inner[k + 1] * u2.value(traj->time(k + 1), Side::left));
    }
    const double x_end = (*traj)[traj->size() - 1];
    return {x_end + outer, outer, x_end, period};
}

}  // namespace needleseek
