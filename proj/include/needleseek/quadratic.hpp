#pragma once

// Closed forms for F(x) = x^2 + b x + c with 4c - b^2 > 0.
//
// On the first half of period j (u1 = +1, u2 = 0 after the needle) the
// unperturbed solution anchored at x(jT + eps) = x_j is
//   x*(t) = (tan(p (t + K_j)) sqrt(D) - b) / 2,   D = 4c - b^2,  p = sqrt(D)/2,
//   K_j   = -jT - eps + atan((b + 2 x_j) / sqrt(D)) / p,
// and the transition value is Phi(t, s) = (cos(p (s + K_j)) / cos(p (t + K_j)))^2.
// Both are valid on [jT, jT + T/2] as long as p (t + K_j) stays inside
// (-pi/2, pi/2); leaving that interval is a finite escape.

#include <stdexcept>
#include <string>
#include <vector>

namespace needleseek {

struct QuadraticCase {
    double b = 0.0;
    double c = 0.0;
    double p = 0.0;          // sqrt(4c - b^2) / 2, zero when not positive
    double sqrt_disc = 0.0;  // sqrt(4c - b^2)
    bool discriminant_positive = false;

    [[nodiscard]] double x_min() const noexcept { return -b / 2.0; }
};

[[nodiscard]] QuadraticCase quadratic_case(double b, double c);

/// 4c - b^2 <= 0: no closed form here; simulate instead.
class UnsupportedCase : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// sin(pT/2 - 2p eps) vanishes: the fixed-point formula is singular.
class DegenerateAngle : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

[[nodiscard]] double anchor_offset(const QuadraticCase& q, int j, double x_j, double period, double epsilon);

/// Escape time (pi/2 + m pi)/p - K_j for the smallest integer m with the
/// result >= t_start.
[[nodiscard]] double escape_time(const QuadraticCase& q, int j, double x_j, double period, double epsilon,
                                 double t_start);

/// Throws UnsupportedCase, std::invalid_argument for t outside
/// [jT, jT + T/2], EscapeError (sim.hpp) past the escape time.
[[nodiscard]] double xstar_closed_form(const QuadraticCase& q, double t, int j, double x_j, double period,
                                       double epsilon);

[[nodiscard]] double phi_closed_form(const QuadraticCase& q, double t, double t_j, int j, double x_j,
                                     double period, double epsilon);

struct ClosedFormIteration {
    std::vector<double> values;  // x(T), x(2T), ...
    bool aborted = false;
    int failed_period = -1;
    std::string error;
};

/// x_{j+1} = x_j + eps alpha Phi(jT, jT + eps) (1 - Phi(jT + eps, jT + T/2 - eps)).
[[nodiscard]] ClosedFormIteration iterate_closed_form(const QuadraticCase& q, double period, double epsilon,
                                                      double alpha, double x0, long k);

enum class Stability { stable, unstable, undetermined };

[[nodiscard]] const char* to_string(Stability s) noexcept;

struct FixedPoints {
    double x_bar_1 = 0.0;  // cos(a) - 1 branch
    double x_bar_2 = 0.0;  // cos(a) + 1 branch
    Stability stability_1 = Stability::undetermined;
    Stability stability_2 = Stability::undetermined;
    double angle = 0.0;  // a = pT/2 - 2 p eps
};

/// Roots of 1 - Phi(eps, T/2 - eps) = 0. Stability is found by iterating
/// 50 periods from x_bar +- 1e-4 (1 + |x_bar|) with the given alpha.
/// A root can sit where x* escapes within the half period; the map is then
/// only defined by continuing the formula through the pole, so residuals and
/// classification use it without the escape check.
[[nodiscard]] FixedPoints fixed_points(const QuadraticCase& q, double period, double epsilon, double alpha);

/// 1 - Phi(eps, T/2 - eps) at x_j = x, without the escape check.
[[nodiscard]] double fixed_point_residual(const QuadraticCase& q, double period, double epsilon, double x);

/// sin(a) (1 - w^2) + 2 cos(a) w with w = (b + 2x)/sqrt(D).
[[nodiscard]] double fixed_point_w_residual(const QuadraticCase& q, double period, double epsilon, double x);

}  // namespace needleseek
