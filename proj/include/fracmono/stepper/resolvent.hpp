#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracmono/kernels/weights.hpp"
#include "fracmono/operators/operator.hpp"

namespace fracmono::stepper {

struct SolverConfig {
    kernels::MemoryScheme scheme = kernels::MemoryScheme::L1;
    double dt = 1e-2;
    /// Bound on ||u + c A(u) - r||_H, relative to max(1, ||r||_H).
    double nonlinear_tol = 1e-10;
    std::size_t max_newton = 50;
    /// Initial Newton step length in (0, 1].
    double damping = 1.0;

    /// Throws std::invalid_argument on non-positive dt or tolerance, zero
    /// max_newton, or damping outside (0, 1].
    void validate() const;
};

struct ResolventResult {
    std::vector<double> u;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Solves u + c A(t, u) = r.
///
/// Newton on F(u) = u + c A(u) - r with Jacobian I + c dA. A step is taken
/// whole when it lowers ||F||_H, otherwise it is backtracked on the energy
/// 1/2 ||u - r||_H^2 + c Phi(u), whose H-gradient is F. If Newton fails to
/// give descent the steepest-descent direction -F is used instead.
/// Starts from `guess` when given, otherwise from r.
/// Throws NonConvergence after cfg.max_newton iterations.
ResolventResult resolvent_solve(const operators::MonotoneOperator& op, double c, std::span<const double> r, double t,
                                const SolverConfig& cfg, std::span<const double> guess = {});

std::vector<double> resolvent_step(const operators::MonotoneOperator& op, double c, std::span<const double> r,
                                   double t, const SolverConfig& cfg);

} // namespace fracmono::stepper
