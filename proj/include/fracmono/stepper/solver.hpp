#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracmono/operators/operator.hpp"
#include "fracmono/series.hpp"
#include "fracmono/stepper/resolvent.hpp"

namespace fracmono::stepper {

/// f(t) written into `out` (a nodal dual vector). An empty function means f = 0.
using Forcing = std::function<void(double t, std::span<double> out)>;

struct ProblemSpec {
    double beta = 0.5;
    double T = 1.0;
    std::vector<double> x0;
    operators::OperatorSpec op;
    operators::TripleSpec triple;
    Forcing forcing;

    /// Throws std::invalid_argument unless 0 < beta <= 1, T > 0, x0 is finite
    /// and matches the grid.
    void validate() const;
};

struct StepDiagnostics {
    std::size_t newton_iters = 0;
    double residual = 0.0;
    double norm_H = 0.0;
    double norm_V = 0.0;
    /// dt ||f_n - A(u_n)||_H, the H-norm of the increment of the discrete
    /// convolution g_{1-beta} * (u - x0) over the step.
    double memory_increment = 0.0;
};

struct TrajectoryRecord {
    double beta = 1.0;
    double dt = 0.0;
    kernels::MemoryScheme scheme = kernels::MemoryScheme::L1;
    std::vector<double> times;
    NodalSeries states;
    std::vector<StepDiagnostics> diagnostics;

    [[nodiscard]] std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
    [[nodiscard]] std::span<const double> final_state() const { return states.row(states.n_nodes() - 1); }
};

/// Number of steps N with N dt = T. Throws std::invalid_argument when T/dt is
/// not an integer up to a relative 1e-9.
std::size_t step_count(double T, double dt);

/// Implicit marching for D^beta (u - x0) + A(t, u) = f(t), u_0 = x0.
///
/// L1: with a = dt^-beta / Gamma(2 - beta),
///   a sum_{j<n} b_{n-1-j} (u_{j+1} - u_j) + A(t_n, u_n) = f(t_n),
/// solved as u_n + A(u_n)/a = r_n with r_n a convex combination of the
/// history plus f(t_n)/a.
/// GL: dt^-beta sum_k w_k (u_{n-k} - x0) + A(t_n, u_n) = f(t_n).
/// beta = 1 always runs the GL recursion, which is backward Euler.
/// NonConvergence carries the failing node.
TrajectoryRecord solve_deterministic(const ProblemSpec& problem, const SolverConfig& cfg);

/// Same marching with a prebuilt operator.
TrajectoryRecord march(const operators::MonotoneOperator& op, double beta, double T, std::span<const double> x0,
                       const Forcing& forcing, const SolverConfig& cfg);

} // namespace fracmono::stepper
