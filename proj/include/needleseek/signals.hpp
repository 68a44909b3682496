#pragma once

// T-periodic dither signals.
//
// Piecewise definitions are right-continuous: the value at a breakpoint
// belongs to the interval that starts there. Every signal can also report
// its left limit, which fixed-step integrators need at the end of a step
// that lands exactly on a breakpoint.
//
// Phases closer than snap_tolerance() to a breakpoint are snapped onto it,
// so that grid times like k*h that land a few ulps off a breakpoint are
// classified the same way as the exact breakpoint.

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace needleseek {

enum class SignalKind { square_u1, two_needle_u2, trig_cos, trig_sin, smooth_root, custom, needle_discretized };

enum class Side { right, left };

/// Period T, needle width epsilon, needle amplitude alpha. Requires
/// T > 0 and 0 < epsilon < T/2.
struct NeedleSpec {
    double period = 0.0;
    double epsilon = 0.0;
    double alpha = 0.0;

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

class Signal {
public:
    using Shape = std::function<double(double)>;

    /// Piecewise-constant signal: levels[i] on [breaks[i], breaks[i+1]),
    /// the last level runs up to the period. breaks[0] must be 0.
    static Signal piecewise(SignalKind kind, double period, std::vector<double> breaks,
                            std::vector<double> levels);

    /// Signal given by a shape on the reduced phase [0, T]; the left limit
    /// at a period boundary evaluates shape(T).
    static Signal smooth(SignalKind kind, double period, double bound, Shape shape);

    /// Constant signal, useful for u1 == 1 or u2 == 0.
    static Signal constant(double level, double period = 1.0);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] double bound() const noexcept { return bound_; }
    [[nodiscard]] SignalKind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_piecewise_constant() const noexcept { return !shape_; }

    /// Discontinuity candidates in [0, T); empty for smooth signals.
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breaks_; }

    [[nodiscard]] double operator()(double t) const { return value(t, Side::right); }
    [[nodiscard]] double value(double t, Side side) const;

    [[nodiscard]] double snap_tolerance() const noexcept { return 1e-9 * period_; }

private:
    Signal(SignalKind kind, double period, double bound);

    [[nodiscard]] double phase(double t, Side side) const;

    SignalKind kind_;
    double period_;
    double bound_;
    std::vector<double> breaks_;
    std::vector<double> levels_;
    Shape shape_;
};

/// Square wave: +1 on [0, T/2), -1 on [T/2, T).
[[nodiscard]] Signal two_needle_u1(const NeedleSpec& spec);

/// alpha on [0, eps), 0 on [eps, T/2), -alpha on [T/2, T/2 + eps), 0 after.
[[nodiscard]] Signal two_needle_u2(const NeedleSpec& spec);

/// (sqrt(w) cos(w t), sqrt(w) sin(w t)) with w = 2 pi / T.
[[nodiscard]] std::pair<Signal, Signal> trig_pair(double period);

/// (sin(2 pi t / T)^(1/(2N+1)), cos(2 pi t / T)^(2N+1)), sign-preserving
/// odd root; a smooth approximation of the two-needle pair for large N.
[[nodiscard]] std::pair<Signal, Signal> smooth_root_pair(double period, int n);

/// Custom T-periodic signal: `shape` is evaluated on the reduced phase.
[[nodiscard]] Signal custom_signal(double period, double bound, Signal::Shape shape);

/// Piecewise-constant signal equal to u2 at the right endpoint of each of
/// N equal subintervals of [0, T]. The endpoint sample is the limit taken
/// from inside the subinterval, so a needle that ends at t_{i+1} is kept.
[[nodiscard]] Signal needle_discretize(const Signal& u2, int n);

/// (1/T) * integral over one period by composite trapezoid with `samples`
/// panels.
[[nodiscard]] double period_mean(const Signal& s, int samples = 20000);

}  // namespace needleseek
