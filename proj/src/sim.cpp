#include "needleseek/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace needleseek {

namespace {

// Misalignment allowed between a grid node and a breakpoint, relative to the
// signal period. Matches the snapping tolerance of Signal.
constexpr double kAlignTolerance = 1e-9;

bool is_multiple(double length, double step, double abs_tol) {
    const double r = length / step;
    return std::abs(r - std::round(r)) * step <= abs_tol;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool within_guard(std::span<const double> x, double max_state) {
    return std::all_of(x.begin(), x.end(),
                       [max_state](double v) { return std::isfinite(v) && std::abs(v) <= max_state; });
}

// Fixed-step driver. `rhs(t, side, x, dx)` evaluates the vector field; the
// side tells discontinuous inputs which one-sided value to use.
template <class Rhs>
Trajectory drive(Rhs&& rhs, const State& x0, double t0, std::size_t steps, const SolverConfig& cfg) {
    const std::size_t n = x0.size();
    Trajectory traj(t0, cfg.step, n);
    if (!within_guard(x0, cfg.max_state)) {
        throw std::invalid_argument("initial state violates the divergence guard");
    }
    traj.push(x0);

    const double h = cfg.step;
    State x = x0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const double t_next = t0 + static_cast<double>(k + 1) * h;
        if (cfg.method == Method::euler) {
            rhs(t, Side::right, x, k1);
            for (std::size_t i = 0; i < n; ++i) x[i] += h * k1[i];
        } else {
            const double mid = t + 0.5 * h;
            rhs(t, Side::right, x, k1);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
            rhs(mid, Side::right, tmp, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
            rhs(mid, Side::right, tmp, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
            rhs(t_next, Side::left, tmp, k4);
            for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!within_guard(x, cfg.max_state)) {
            traj.mark_diverged("divergence guard: |x| exceeded " + fmt17(cfg.max_state) + " at t=" + fmt17(t_next));
            break;
        }
        traj.push(x);
    }
    return traj;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("solver step h must be positive (got h=" + fmt17(step) + ")");
    }
    if (!(max_state > 0.0)) {
        throw std::invalid_argument("solver max_state must be positive");
    }
}

SolverConfig default_config(const NeedleSpec& spec) {
    spec.validate();
    const double half = spec.period / 2.0;
    auto m = static_cast<long long>(std::max(20.0, std::ceil(20000.0 * spec.epsilon / spec.period - 1e-9)));
    for (; m <= 1'000'000; ++m) {
        const double h = spec.epsilon / static_cast<double>(m);
        if (is_multiple(half, h, kAlignTolerance * spec.period)) {
            return SolverConfig{Method::rk4, h, 1e6};
        }
    }
    throw AlignmentError("no step eps/m aligns with T/2 (epsilon=" + fmt17(spec.epsilon) + ", T=" +
                         fmt17(spec.period) + ")");
}

std::size_t steps_for(double length, double step) {
    if (!(length >= 0.0)) throw std::invalid_argument("integration length must be non-negative");
    const double r = length / step;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-6) {
        throw std::invalid_argument("length " + fmt17(length) + " is not an integer multiple of step " +
                                    fmt17(step));
    }
    return static_cast<std::size_t>(n);
}

Trajectory::Trajectory(double t0, double step, std::size_t dim) : t0_(t0), step_(step), dim_(dim) {
    if (dim == 0) throw std::invalid_argument("trajectory dimension must be positive");
}

void Trajectory::push(std::span<const double> x) {
    data_.insert(data_.end(), x.begin(), x.end());
}

void Trajectory::mark_diverged(std::string reason) {
    termination_ = Termination::diverged;
    reason_ = std::move(reason);
}

void Trajectory::write_csv(std::ostream& os) const {
    os << 't';
    for (std::size_t i = 0; i < dim_; ++i) os << ",x" << (i + 1);
    os << '\n';
    for (std::size_t k = 0; k < size(); ++k) {
        os << fmt17(time(k));
        for (double v : state(k)) os << ',' << fmt17(v);
        os << '\n';
    }
}

void check_alignment(const Signal& s, double step, double t0) {
    const double tol = kAlignTolerance * s.period();
    if (s.breakpoints().empty() || s.breakpoints().size() == 1) {
        // constant or smooth; a single breakpoint at phase 0 still needs the period aligned
        if (s.breakpoints().empty()) return;
    }
    if (!is_multiple(s.period(), step, tol)) {
        throw AlignmentError("step h=" + fmt17(step) + " does not divide the signal period T=" + fmt17(s.period()));
    }
    const double offset = t0 - s.period() * std::floor(t0 / s.period());
    for (double b : s.breakpoints()) {
        if (!is_multiple(b - offset, step, tol)) {
            throw AlignmentError("step h=" + fmt17(step) + " does not land on signal breakpoint " + fmt17(b) +
                                 " (period " + fmt17(s.period()) + ")");
        }
    }
}

Trajectory integrate_affine(const ScalarField& g1, const ScalarField& g2, const Signal& u1, const Signal& u2,
                            double x0, double horizon, const SolverConfig& cfg, double t0) {
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    // Constant signals have no real discontinuity; only their period would be checked.
    if (u1.breakpoints().size() > 1) check_alignment(u1, cfg.step, t0);
    if (u2.breakpoints().size() > 1) check_alignment(u2, cfg.step, t0);
    const std::size_t steps = steps_for(horizon, cfg.step);
    auto rhs = [&](double t, Side side, std::span<const double> x, std::span<double> dx) {
        dx[0] = g1(x[0]) * u1.value(t, side) + g2(x[0]) * u2.value(t, side);
    };
    return drive(rhs, State{x0}, t0, steps, cfg);
}

Trajectory integrate_affine(const Objective& f, const Signal& u1, const Signal& u2, double x0, double horizon,
                            const SolverConfig& cfg, double t0) {
    if (f.dim() != 1) throw std::invalid_argument("integrate_affine needs a scalar objective");
    return integrate_affine([&f](double x) { return f.value(x); }, [](double) { return 1.0; }, u1, u2, x0,
                            horizon, cfg, t0);
}

Trajectory integrate_ode(const VectorField& f, const State& x0, double horizon, const SolverConfig& cfg,
                         double t0) {
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (x0.empty()) throw std::invalid_argument("initial state must be non-empty");
    const std::size_t steps = steps_for(horizon, cfg.step);
    auto rhs = [&f](double t, Side, std::span<const double> x, std::span<double> dx) { f(t, x, dx); };
    return drive(rhs, x0, t0, steps, cfg);
}

Trajectory unperturbed_solution(const Objective& f, const NeedleSpec& spec, double x0, int periods,
                                const SolverConfig& cfg) {
    spec.validate();
    if (periods < 1) throw std::invalid_argument("periods must be >= 1");
    const Signal u1 = two_needle_u1(spec);
    const Signal zero = Signal::constant(0.0, spec.period);
    Trajectory traj = integrate_affine(f, u1, zero, x0, periods * spec.period, cfg);
    if (traj.terminated_early() && traj.end_time() < spec.period) {
        throw EscapeError("unperturbed solution escapes within the first period: " + traj.termination_reason(),
                          traj.end_time());
    }
    return traj;
}

}  // namespace needleseek
