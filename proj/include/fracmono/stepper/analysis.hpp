#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fracmono/stepper/solver.hpp"

namespace fracmono::stepper {

/// max_n || u_n - x0 + (g_beta * A(u))_n - (g_beta * f)_n ||_H with the
/// product-rectangle quadrature of kernels::fractional_integral.
double integral_equation_residual(const TrajectoryRecord& trajectory, const ProblemSpec& problem);

struct OrderEstimate {
    double order = 0.0;
    std::vector<double> dts;
    /// Error per dt against the reference, or ||u^{dt_i}(T) - u^{dt_{i+1}}(T)||_H
    /// for self-convergence (one entry fewer).
    std::vector<double> errors;
    /// False when the errors do not decrease with dt; the slope is still given.
    bool monotone = true;
};

/// Least-squares slope of log error against log dt at t = T. With a reference
/// state the error is ||u_N - reference||_H; without one, successive solutions
/// are differenced. Needs at least three step sizes, given in decreasing order.
OrderEstimate estimate_order(const ProblemSpec& problem, const SolverConfig& cfg, std::span<const double> dts,
                             std::optional<std::vector<double>> reference = std::nullopt);

struct DecayEstimate {
    /// Slope of log ||u||_H against log t over the window.
    double exponent = 0.0;
    /// Slope of log ||u||_H against t.
    double exponential_rate = 0.0;
    double algebraic_r2 = 0.0;
    double exponential_r2 = 0.0;
    /// True when the semi-log fit is the better one: the log-log slope keeps
    /// steepening and the decay is exponential rather than algebraic.
    bool exponential = false;
};

/// Fits the tail of the trajectory; `window` is the fraction of the time
/// interval used, ending at T. Throws std::domain_error when a norm in the
/// window is zero or fewer than three nodes fall in it.
DecayEstimate estimate_decay_exponent(const TrajectoryRecord& trajectory, double window);

} // namespace fracmono::stepper
