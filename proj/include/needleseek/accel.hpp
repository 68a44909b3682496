#pragma once

// Second-order optimization dynamics on z = (z1, z2) in R^n x R^n:
//
//   hybrid     : z1' = z2,  z2' = -k z2 - c1 grad F(z1) - c2 grad F(z1 + gamma z2)
//   heavy_ball : the c2 term dropped
//   nesterov   : the c1 term dropped (gradient at the look-ahead point)
//
// V = |z2|^2 / 2 + c (F(z1) - F*) is monitored along the run, with c the sum
// of the active gradient gains.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "needleseek/objective.hpp"
#include "needleseek/sim.hpp"

namespace needleseek {

enum class AccelMethod { hybrid, heavy_ball, nesterov };

[[nodiscard]] const char* to_string(AccelMethod m) noexcept;

struct AccelParams {
    AccelMethod method = AccelMethod::hybrid;
    double k = 2.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double gamma = 1.0;

    /// Throws std::invalid_argument for a violated constraint. Returns notes
    /// about parameters the chosen method ignores.
    std::vector<std::string> validate() const;

    /// Gain multiplying F in the Lyapunov function.
    [[nodiscard]] double potential_gain() const noexcept;
};

/// `state` and `out` hold 2 * F.dim() entries: z1 then z2.
void accel_rhs(const Objective& f, const AccelParams& params, std::span<const double> state,
               std::span<double> out);

struct LyapunovTrace {
    std::vector<double> times;
    std::vector<double> values;
};

struct AccelRun {
    Trajectory trajectory;
    LyapunovTrace lyapunov;
    std::vector<std::string> notes;
};

/// F* defaults to the objective's known minimum; failing that, the smallest
/// F(z1) seen on the run is used and a note says so.
[[nodiscard]] AccelRun run_accel(const Objective& f, const AccelParams& params, const State& z0, double horizon,
                                 const SolverConfig& cfg, std::optional<double> f_star = std::nullopt);

using XiPair = std::array<double, 2>;

/// xi1+ = xi2,  xi2+ = xi1 + eps^2 alpha (dF(xi1) + dF(xi2)). The returned
/// list starts with xi0 and has k_steps + 1 entries.
[[nodiscard]] std::vector<XiPair> euler_discretize_xi(const Objective& f, double epsilon, double alpha, XiPair xi0,
                                                      int k_steps);

/// Nesterov parameters whose vector field equals the hybrid one for
/// quadratic F: c2' = c1 + c2, gamma' = c2 gamma / (c1 + c2).
[[nodiscard]] AccelParams nesterov_equivalent(const AccelParams& hybrid);

/// Heavy ball with the same total stiffness: c1' = c1 + c2.
[[nodiscard]] AccelParams heavy_ball_equivalent(const AccelParams& hybrid);

}  // namespace needleseek
