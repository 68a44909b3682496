#pragma once

// Fixed-step integration of x' = g1(x) u1(t) + g2(x) u2(t) and of general
// ODEs. Trajectories are stored densely, one state per step, because the
// variational quantities are integrated along the stored path.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "needleseek/objective.hpp"
#include "needleseek/signals.hpp"

namespace needleseek {

enum class Method { euler, rk4 };

struct SolverConfig {
    Method method = Method::rk4;
    double step = 1e-3;
    double max_state = 1e6;

    void validate() const;
};

/// rk4, h = min(eps/20, T/20000) refined to eps/m (integer m >= 20) so that
/// T/(2h) is an integer; max_state = 1e6. Throws AlignmentError if no m up
/// to 10^6 aligns.
[[nodiscard]] SolverConfig default_config(const NeedleSpec& spec);

/// Raised when the step does not land on every signal breakpoint.
class AlignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a solution the caller requires does not exist (finite escape).
class EscapeError : public std::runtime_error {
public:
    EscapeError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

enum class Termination { completed, diverged };

class Trajectory {
public:
    Trajectory(double t0, double step, std::size_t dim);

    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size() / dim_; }
    [[nodiscard]] double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * step_; }
    [[nodiscard]] double end_time() const noexcept { return time(size() - 1); }

    [[nodiscard]] std::span<const double> state(std::size_t k) const {
        return {data_.data() + k * dim_, dim_};
    }
    /// First coordinate of state k (the whole state for scalar systems).
    [[nodiscard]] double operator[](std::size_t k) const { return data_[k * dim_]; }
    [[nodiscard]] std::span<const double> back() const { return state(size() - 1); }

    [[nodiscard]] bool terminated_early() const noexcept { return termination_ != Termination::completed; }
    [[nodiscard]] Termination termination() const noexcept { return termination_; }
    [[nodiscard]] const std::string& termination_reason() const noexcept { return reason_; }

    void push(std::span<const double> x);
    void mark_diverged(std::string reason);

    /// CSV with header t,x1[,x2,...]; 17 significant digits.
    void write_csv(std::ostream& os) const;

private:
    double t0_;
    double step_;
    std::size_t dim_;
    std::vector<double> data_;
    Termination termination_ = Termination::completed;
    std::string reason_;
};

using ScalarField = std::function<double(double)>;
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

/// Throws AlignmentError unless every breakpoint of `s` (shifted by t0 and
/// by whole periods) is an integer number of steps away from t0.
void check_alignment(const Signal& s, double step, double t0 = 0.0);

/// x' = g1(x) u1(t) + g2(x) u2(t) on [t0, t0 + horizon]. The horizon must be
/// an integer number of steps. Stops and marks the trajectory when |x|
/// exceeds cfg.max_state.
[[nodiscard]] Trajectory integrate_affine(const ScalarField& g1, const ScalarField& g2, const Signal& u1,
                                          const Signal& u2, double x0, double horizon, const SolverConfig& cfg,
                                          double t0 = 0.0);

/// The extremum-seeking system x' = F(x) u1(t) + u2(t).
[[nodiscard]] Trajectory integrate_affine(const Objective& f, const Signal& u1, const Signal& u2, double x0,
                                          double horizon, const SolverConfig& cfg, double t0 = 0.0);

[[nodiscard]] Trajectory integrate_ode(const VectorField& f, const State& x0, double horizon,
                                       const SolverConfig& cfg, double t0 = 0.0);

/// x*(t): the solution with the square-wave u1 and u2 == 0 over `periods`
/// periods. Throws EscapeError if x* escapes within the first period.
[[nodiscard]] Trajectory unperturbed_solution(const Objective& f, const NeedleSpec& spec, double x0, int periods,
                                              const SolverConfig& cfg);

/// Number of steps covering `length`; throws std::invalid_argument if the
/// length is not an integer multiple of `step`.
[[nodiscard]] std::size_t steps_for(double length, double step);

}  // namespace needleseek
