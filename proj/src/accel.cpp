#include "needleseek/accel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace needleseek {

namespace {

void require_positive(double v, const char* name, const char* method) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be > 0 for " + method);
    }
}

}  // namespace

const char* to_string(AccelMethod m) noexcept {
    switch (m) {
        case AccelMethod::hybrid: return "hybrid";
        case AccelMethod::heavy_ball: return "heavy_ball";
        case AccelMethod::nesterov: return "nesterov";
    }
    return "hybrid";
}

std::vector<std::string> AccelParams::validate() const {
    std::vector<std::string> notes;
    const char* name = to_string(method);
    require_positive(k, "k", name);
    switch (method) {
        case AccelMethod::hybrid:
            require_positive(c1, "c1", name);
            require_positive(c2, "c2", name);
            require_positive(gamma, "gamma", name);
            break;
        case AccelMethod::heavy_ball:
            require_positive(c1, "c1", name);
            if (c2 != 0.0) notes.emplace_back("heavy_ball ignores c2");
            if (gamma != 0.0) notes.emplace_back("heavy_ball ignores gamma");
            break;
        case AccelMethod::nesterov:
            require_positive(c2, "c2", name);
            if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
                throw std::invalid_argument("gamma must be >= 0 for nesterov");
            }
            if (c1 != 0.0) notes.emplace_back("nesterov ignores c1");
            break;
    }
    return notes;
}

double AccelParams::potential_gain() const noexcept {
    switch (method) {
        case AccelMethod::hybrid: return c1 + c2;
        case AccelMethod::heavy_ball: return c1;
        case AccelMethod::nesterov: return c2;
    }
    return c1 + c2;
}

void accel_rhs(const Objective& f, const AccelParams& params, std::span<const double> state,
               std::span<double> out) {
    const std::size_t n = f.dim();
    if (state.size() != 2 * n || out.size() != 2 * n) {
        throw std::invalid_argument("accel state must have dimension 2 * dim(F)");
    }
    const auto z1 = state.first(n);
    const auto z2 = state.subspan(n);
    auto dz1 = out.first(n);
    auto dz2 = out.subspan(n);

    State g(n), look(n);
    const bool use_c1 = params.method != AccelMethod::nesterov;
    const bool use_c2 = params.method != AccelMethod::heavy_ball;
    for (std::size_t i = 0; i < n; ++i) {
        dz1[i] = z2[i];
        dz2[i] = -params.k * z2[i];
    }
    if (use_c1) {
        f.gradient(z1, g);
        for (std::size_t i = 0; i < n; ++i) dz2[i] -= params.c1 * g[i];
    }
    if (use_c2) {
        for (std::size_t i = 0; i < n; ++i) look[i] = z1[i] + params.gamma * z2[i];
        f.gradient(look, g);
        for (std::size_t i = 0; i < n; ++i) dz2[i] -= params.c2 * g[i];
    }
}

AccelRun run_accel(const Objective& f, const AccelParams& params, const State& z0, double horizon,
                   const SolverConfig& cfg, std::optional<double> f_star) {
    std::vector<std::string> notes = params.validate();
    const std::size_t n = f.dim();
    if (z0.size() != 2 * n) throw std::invalid_argument("accel state must have dimension 2 * dim(F)");

    auto rhs = [&f, &params](double, std::span<const double> z, std::span<double> dz) {
        accel_rhs(f, params, z, dz);
    };
    Trajectory traj = integrate_ode(rhs, z0, horizon, cfg);
    if (traj.terminated_early()) notes.push_back(traj.termination_reason());

    std::vector<double> fvals(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) fvals[k] = f(traj.state(k).first(n));

    double reference = 0.0;
    if (f_star) {
        reference = *f_star;
    } else if (f.minimum()) {
        reference = f.minimum()->value;
    } else {
        reference = *std::min_element(fvals.begin(), fvals.end());
        notes.emplace_back("minimum of F unknown; V uses the smallest F seen on the run");
    }

    LyapunovTrace trace;
    trace.times.reserve(traj.size());
    trace.values.reserve(traj.size());
    const double gain = params.potential_gain();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double kinetic = 0.0;
        for (double v : traj.state(k).subspan(n)) kinetic += v * v;
        trace.times.push_back(traj.time(k));
        trace.values.push_back(0.5 * kinetic + gain * (fvals[k] - reference));
    }
    return {std::move(traj), std::move(trace), std::move(notes)};
}

std::vector<XiPair> euler_discretize_xi(const Objective& f, double epsilon, double alpha, XiPair xi0,
                                        int k_steps) {
    if (f.dim() != 1) throw std::invalid_argument("euler_discretize_xi needs a scalar objective");
    if (k_steps < 1) throw std::invalid_argument("euler_discretize_xi: k_steps must be >= 1");
    const double gain = epsilon * epsilon * alpha;
    std::vector<XiPair> seq;
    seq.reserve(static_cast<std::size_t>(k_steps) + 1);
    seq.push_back(xi0);
    for (int i = 0; i < k_steps; ++i) {
        const auto [a, b] = seq.back();
        seq.push_back({b, a + gain * (f.slope(a) + f.slope(b))});
    }
    return seq;
}

AccelParams nesterov_equivalent(const AccelParams& hybrid) {
    const double total = hybrid.c1 + hybrid.c2;
    return {AccelMethod::nesterov, hybrid.k, 0.0, total, hybrid.c2 * hybrid.gamma / total};
}

AccelParams heavy_ball_equivalent(const AccelParams& hybrid) {
    return {AccelMethod::heavy_ball, hybrid.k, hybrid.c1 + hybrid.c2, 0.0, 0.0};
}

}  // namespace needleseek
