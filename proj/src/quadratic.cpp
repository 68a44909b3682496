#include "needleseek/quadratic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "needleseek/sim.hpp"

namespace needleseek {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_positive(const QuadraticCase& q) {
    if (!q.discriminant_positive) {
        throw UnsupportedCase("closed form needs 4c - b^2 > 0; use numerical simulation instead");
    }
}

// p (t + K_j) after checking the time window and, unless `formal`, the
// escape condition.
double phase_angle(const QuadraticCase& q, double t, int j, double x_j, double period, double epsilon,
                   bool formal = false) {
    require_positive(q);
    const double start = j * period;
    const double tol = 1e-9 * period;
    if (t < start - tol || t > start + period / 2.0 + tol) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "closed form evaluated at t=%.17g outside [jT, jT + T/2] for j=%d", t, j);
        throw std::invalid_argument(msg);
    }
    const double theta = q.p * (t + anchor_offset(q, j, x_j, period, epsilon));
    if (!formal && !(std::abs(theta) < kHalfPi)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "closed-form solution escapes before t=%.17g (x_j=%.17g)", t, x_j);
        throw EscapeError(msg, t);
    }
    return theta;
}

double phi_ratio(const QuadraticCase& q, double t, double t_j, double x_j, double period, double epsilon,
                 bool formal) {
    const double r = std::cos(phase_angle(q, t_j, 0, x_j, period, epsilon, formal)) /
                     std::cos(phase_angle(q, t, 0, x_j, period, epsilon, formal));
    return r * r;
}

// One period of the closed-form map, anchored at j = 0 (the map is shift
// invariant, and a small j keeps t + K_j free of cancellation). The formal
// map skips the escape check: it is the analytic continuation of the
// formula through the pole, which is where the second fixed point lives.
double period_map(const QuadraticCase& q, double period, double epsilon, double alpha, double x, bool formal) {
    const double a = phi_ratio(q, 0.0, epsilon, x, period, epsilon, formal);
    const double b = phi_ratio(q, epsilon, period / 2.0 - epsilon, x, period, epsilon, formal);
    return x + epsilon * alpha * a * (1.0 - b);
}

Stability classify(const QuadraticCase& q, double period, double epsilon, double alpha, double x_bar) {
    const double delta = 1e-4 * (1.0 + std::abs(x_bar));
    int converging = 0;
    int diverging = 0;
    for (double sign : {1.0, -1.0}) {
        double x = x_bar + sign * delta;
        for (int j = 0; j < 50 && std::isfinite(x); ++j) x = period_map(q, period, epsilon, alpha, x, true);
        const double ratio = std::isfinite(x) ? std::abs(x - x_bar) / delta : std::numeric_limits<double>::infinity();
        if (ratio < 1.0 - 1e-6) ++converging;
        if (ratio > 1.0 + 1e-6) ++diverging;
    }
    if (converging == 2) return Stability::stable;
    if (diverging == 2) return Stability::unstable;
    return Stability::undetermined;
}

}  // namespace

QuadraticCase quadratic_case(double b, double c) {
    QuadraticCase q{b, c};
    const double disc = 4.0 * c - b * b;
    q.discriminant_positive = disc > 0.0;
    if (q.discriminant_positive) {
        q.sqrt_disc = std::sqrt(disc);
        q.p = q.sqrt_disc / 2.0;
    }
    return q;
}

double anchor_offset(const QuadraticCase& q, int j, double x_j, double period, double epsilon) {
    require_positive(q);
    return -j * period - epsilon + std::atan((q.b + 2.0 * x_j) / q.sqrt_disc) / q.p;
}

double escape_time(const QuadraticCase& q, int j, double x_j, double period, double epsilon, double t_start) {
    const double first = kHalfPi / q.p - anchor_offset(q, j, x_j, period, epsilon);
    const double spacing = std::numbers::pi / q.p;
    const double m = std::ceil((t_start - first) / spacing - 1e-12);
    return first + m * spacing;
}

double xstar_closed_form(const QuadraticCase& q, double t, int j, double x_j, double period, double epsilon) {
    const double theta = phase_angle(q, t, j, x_j, period, epsilon);
    return 0.5 * (std::tan(theta) * q.sqrt_disc - q.b);
}

double phi_closed_form(const QuadraticCase& q, double t, double t_j, int j, double x_j, double period,
                       double epsilon) {
    const double num = std::cos(phase_angle(q, t_j, j, x_j, period, epsilon));
    const double den = std::cos(phase_angle(q, t, j, x_j, period, epsilon));
    const double r = num / den;
    return r * r;
}

ClosedFormIteration iterate_closed_form(const QuadraticCase& q, double period, double epsilon, double alpha,
                                        double x0, long k) {
    require_positive(q);
    if (k < 1) throw std::invalid_argument("iterate_closed_form: k must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < period / 2.0)) {
        throw std::invalid_argument("iterate_closed_form: need 0 < epsilon < T/2");
    }
    ClosedFormIteration out;
    out.values.reserve(static_cast<std::size_t>(k));
    double x = x0;
    for (long j = 0; j < k; ++j) {
        try {
            x = period_map(q, period, epsilon, alpha, x, false);
            if (!std::isfinite(x)) throw EscapeError("non-finite iterate", (j + 1) * period);
        } catch (const EscapeError& e) {
            out.aborted = true;
            out.failed_period = static_cast<int>(j);
            out.error = "period " + std::to_string(j) + ": " + e.what();
            break;
        }
        out.values.push_back(x);
    }
    return out;
}

const char* to_string(Stability s) noexcept {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::undetermined: return "undetermined";
    }
    return "undetermined";
}

FixedPoints fixed_points(const QuadraticCase& q, double period, double epsilon, double alpha) {
    require_positive(q);
    FixedPoints fp;
    fp.angle = q.p * period / 2.0 - 2.0 * q.p * epsilon;
    const double s = std::sin(fp.angle);
    if (std::abs(s) < 1e-12) {
        throw DegenerateAngle("sin(pT/2 - 2 p eps) vanishes; fixed points are not defined");
    }
    const double co = std::cos(fp.angle);
    fp.x_bar_1 = 0.5 * (q.sqrt_disc * (co - 1.0) / s - q.b);
    fp.x_bar_2 = 0.5 * (q.sqrt_disc * (co + 1.0) / s - q.b);
    fp.stability_1 = classify(q, period, epsilon, alpha, fp.x_bar_1);
    fp.stability_2 = classify(q, period, epsilon, alpha, fp.x_bar_2);
    return fp;
}

double fixed_point_residual(const QuadraticCase& q, double period, double epsilon, double x) {
    return 1.0 - phi_ratio(q, epsilon, period / 2.0 - epsilon, x, period, epsilon, true);
}

double fixed_point_w_residual(const QuadraticCase& q, double period, double epsilon, double x) {
    require_positive(q);
    const double a = q.p * period / 2.0 - 2.0 * q.p * epsilon;
    const double w = (q.b + 2.0 * x) / q.sqrt_disc;
    return std::sin(a) * (1.0 - w * w) + 2.0 * std::cos(a) * w;
}

}  // namespace needleseek
