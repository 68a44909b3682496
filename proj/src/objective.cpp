#include "needleseek/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace needleseek {

Objective::Objective(std::size_t dim, Field eval, GradField grad, GradKind kind,
                     std::optional<Minimum> minimum)
    : dim_(dim), eval_(std::move(eval)), grad_(std::move(grad)), grad_kind_(kind),
      minimum_(std::move(minimum)) {
    if (dim_ == 0) {
        throw std::invalid_argument("objective dimension must be at least 1");
    }
    if (!eval_ || !grad_) {
        throw std::invalid_argument("objective requires an evaluation and a gradient callable");
    }
}

double Objective::operator()(std::span<const double> x) const {
    return eval_(x);
}

void Objective::gradient(std::span<const double> x, std::span<double> out) const {
    grad_(x, out);
}

State Objective::gradient(std::span<const double> x) const {
    State g(dim_);
    grad_(x, g);
    return g;
}

double Objective::value(double x) const {
    if (dim_ != 1) {
        throw std::logic_error("scalar evaluation on a multi-dimensional objective");
    }
    return eval_(std::span<const double>(&x, 1));
}

double Objective::slope(double x) const {
    if (dim_ != 1) {
        throw std::logic_error("scalar gradient on a multi-dimensional objective");
    }
    double g = 0.0;
    grad_(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
}

void central_difference(const Objective::Field& f, std::span<const double> x, std::span<double> out) {
    State probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        out[i] = (up - down) / (2.0 * h);
    }
}

Objective quadratic_objective(double b, double c) {
    auto eval = [b, c](std::span<const double> x) { return x[0] * x[0] + b * x[0] + c; };
    auto grad = [b](std::span<const double> x, std::span<double> g) { g[0] = 2.0 * x[0] + b; };
    const double x_min = -b / 2.0;
    return Objective(1, eval, grad, GradKind::analytic, Minimum{{x_min}, c - b * b / 4.0});
}

Objective abs_cubed_objective() {
    auto eval = [](std::span<const double> x) {
        const double a = std::abs(x[0]);
        return a * a * a;
    };
    auto grad = [](std::span<const double> x, std::span<double> g) { g[0] = 3.0 * x[0] * std::abs(x[0]); };
    return Objective(1, eval, grad, GradKind::analytic, Minimum{{0.0}, 0.0});
}

Objective custom_objective(std::size_t dim, Objective::Field eval,
                           std::optional<Objective::GradField> grad, std::optional<Minimum> minimum) {
    if (dim == 0) {
        throw std::invalid_argument("custom_objective: dim must be >= 1");
    }
    if (grad) {
        return Objective(dim, std::move(eval), std::move(*grad), GradKind::analytic, std::move(minimum));
    }
    auto fd = [f = eval](std::span<const double> x, std::span<double> g) { central_difference(f, x, g); };
    return Objective(dim, std::move(eval), fd, GradKind::central_difference, std::move(minimum));
}

}  // namespace needleseek
