#pragma once

// Objective functions F with gradient access.
//
// The needle machinery is scalar, the accelerated-gradient dynamics work in
// R^n, so an Objective carries its dimension and evaluates on spans.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace needleseek {

using State = std::vector<double>;

enum class GradKind { analytic, central_difference };

/// Known minimizer and minimum value, when available in closed form.
struct Minimum {
    State argmin;
    double value = 0.0;
};

class Objective {
public:
    using Field = std::function<double(std::span<const double>)>;
    using GradField = std::function<void(std::span<const double>, std::span<double>)>;

    Objective(std::size_t dim, Field eval, GradField grad, GradKind kind,
              std::optional<Minimum> minimum = std::nullopt);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] GradKind grad_kind() const noexcept { return grad_kind_; }
    [[nodiscard]] const std::optional<Minimum>& minimum() const noexcept { return minimum_; }

    [[nodiscard]] double operator()(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;
    [[nodiscard]] State gradient(std::span<const double> x) const;

    // Scalar shorthands; throw std::logic_error unless dim() == 1.
    [[nodiscard]] double value(double x) const;
    [[nodiscard]] double slope(double x) const;

private:
    std::size_t dim_;
    Field eval_;
    GradField grad_;
    GradKind grad_kind_;
    std::optional<Minimum> minimum_;
};

/// F(x) = x^2 + b x + c with analytic gradient 2x + b.
[[nodiscard]] Objective quadratic_objective(double b, double c);

/// F(x) = |x|^3 with gradient 3 x |x|.
[[nodiscard]] Objective abs_cubed_objective();

/// User-supplied objective. Without a gradient, central differences with
/// step 1e-6 * max(1, |x_i|) per coordinate are used.
/// Throws std::invalid_argument for dim == 0.
[[nodiscard]] Objective custom_objective(std::size_t dim, Objective::Field eval,
                                         std::optional<Objective::GradField> grad = std::nullopt,
                                         std::optional<Minimum> minimum = std::nullopt);

/// Central-difference gradient of `f` at `x`, written into `out`.
void central_difference(const Objective::Field& f, std::span<const double> x, std::span<double> out);

}  // namespace needleseek
