#include "needleseek/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace needleseek {

void NeedleSpec::validate() const {
    if (!(period > 0.0) || !std::isfinite(period)) {
        std::ostringstream msg;
        msg << "period T must be positive (got T=" << period << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!(epsilon > 0.0) || !(epsilon < period / 2.0)) {
        std::ostringstream msg;
        msg << "epsilon must satisfy 0 < epsilon < T/2 (got epsilon=" << epsilon << ", T=" << period << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite");
    }
}

Signal::Signal(SignalKind kind, double period, double bound) : kind_(kind), period_(period), bound_(bound) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw std::invalid_argument("signal period must be positive and finite");
    }
}

Signal Signal::piecewise(SignalKind kind, double period, std::vector<double> breaks, std::vector<double> levels) {
    if (breaks.empty() || breaks.size() != levels.size()) {
        throw std::invalid_argument("piecewise signal needs one level per breakpoint");
    }
    if (breaks.front() != 0.0) {
        throw std::invalid_argument("piecewise signal must start at phase 0");
    }
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        if (!(breaks[i] > breaks[i - 1])) {
            throw std::invalid_argument("piecewise breakpoints must be strictly increasing");
        }
    }
    if (!(breaks.back() < period)) {
        throw std::invalid_argument("piecewise breakpoints must lie in [0, T)");
    }
    double bound = 0.0;
    for (double v : levels) bound = std::max(bound, std::abs(v));
    Signal s(kind, period, bound);
    s.breaks_ = std::move(breaks);
    s.levels_ = std::move(levels);
    return s;
}

Signal Signal::smooth(SignalKind kind, double period, double bound, Shape shape) {
    if (!shape) throw std::invalid_argument("smooth signal needs a shape");
    Signal s(kind, period, bound);
    s.shape_ = std::move(shape);
    return s;
}

Signal Signal::constant(double level, double period) {
    return piecewise(SignalKind::custom, period, {0.0}, {level});
}

double Signal::phase(double t, Side side) const {
    double ph = t - period_ * std::floor(t / period_);
    if (ph < 0.0) ph = 0.0;
    const double tol = snap_tolerance();
    if (ph >= period_ - tol) ph = 0.0;
    if (!breaks_.empty()) {
        // nearest breakpoint
        auto it = std::lower_bound(breaks_.begin(), breaks_.end(), ph);
        if (it != breaks_.end() && *it - ph <= tol) {
            ph = *it;
        } else if (it != breaks_.begin() && ph - *std::prev(it) <= tol) {
            ph = *std::prev(it);
        }
    } else if (ph <= tol) {
        ph = 0.0;
    }
    if (side == Side::left && ph == 0.0) ph = period_;
    return ph;
}

double Signal::value(double t, Side side) const {
    const double ph = phase(t, side);
    if (shape_) return shape_(ph);
    // right: b_i <= ph < b_{i+1};  left: b_i < ph <= b_{i+1}
    auto it = side == Side::right ? std::upper_bound(breaks_.begin(), breaks_.end(), ph)
                                  : std::lower_bound(breaks_.begin(), breaks_.end(), ph);
    const auto idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
    return levels_[idx];
}

Signal two_needle_u1(const NeedleSpec& spec) {
    spec.validate();
    return Signal::piecewise(SignalKind::square_u1, spec.period, {0.0, spec.period / 2.0}, {1.0, -1.0});
}

Signal two_needle_u2(const NeedleSpec& spec) {
    spec.validate();
    const double half = spec.period / 2.0;
    return Signal::piecewise(SignalKind::two_needle_u2, spec.period, {0.0, spec.epsilon, half, half + spec.epsilon},
                             {spec.alpha, 0.0, -spec.alpha, 0.0});
}

std::pair<Signal, Signal> trig_pair(double period) {
    if (!(period > 0.0)) throw std::invalid_argument("trig_pair: period must be positive");
    const double w = 2.0 * std::numbers::pi / period;
    const double amp = std::sqrt(w);
    return {Signal::smooth(SignalKind::trig_cos, period, amp, [w, amp](double t) { return amp * std::cos(w * t); }),
            Signal::smooth(SignalKind::trig_sin, period, amp, [w, amp](double t) { return amp * std::sin(w * t); })};
}

std::pair<Signal, Signal> smooth_root_pair(double period, int n) {
    if (!(period > 0.0)) throw std::invalid_argument("smooth_root_pair: period must be positive");
    if (n < 1) throw std::invalid_argument("smooth_root_pair: N must be >= 1");
    const double w = 2.0 * std::numbers::pi / period;
    const int odd = 2 * n + 1;
    // the phase is folded onto [0, 1/4] so sin vanishes exactly at multiples
    // of T/2; a stray 1e-16 would otherwise survive the root as ~1e-2
    auto root = [period, odd](double t) {
        double f = t / period - std::floor(t / period);
        double sign = 1.0;
        if (f >= 0.5) {
            f -= 0.5;
            sign = -1.0;
        }
        if (f > 0.25) f = 0.5 - f;
        const double s = std::sin(2.0 * std::numbers::pi * f);
        return sign * std::pow(s, 1.0 / odd);
    };
    auto power = [w, odd](double t) { return std::pow(std::cos(w * t), odd); };
    return {Signal::smooth(SignalKind::smooth_root, period, 1.0, root),
            Signal::smooth(SignalKind::smooth_root, period, 1.0, power)};
}

Signal custom_signal(double period, double bound, Signal::Shape shape) {
    return Signal::smooth(SignalKind::custom, period, bound, std::move(shape));
}

Signal needle_discretize(const Signal& u2, int n) {
    if (n < 1) throw std::invalid_argument("needle_discretize: N must be >= 1");
    const double period = u2.period();
    const double width = period / n;
    std::vector<double> breaks(static_cast<std::size_t>(n));
    std::vector<double> levels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        breaks[static_cast<std::size_t>(i)] = i * width;
        levels[static_cast<std::size_t>(i)] = u2.value((i + 1) * width, Side::left);
    }
    return Signal::piecewise(SignalKind::needle_discretized, period, std::move(breaks), std::move(levels));
}

double period_mean(const Signal& s, int samples) {
    if (samples < 1) throw std::invalid_argument("period_mean: samples must be >= 1");
    const double h = s.period() / samples;
    double sum = 0.0;
    for (int k = 0; k < samples; ++k) {
        sum += 0.5 * (s.value(k * h, Side::right) + s.value((k + 1) * h, Side::left));
    }
    return sum * h / s.period();
}

}  // namespace needleseek
