#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracmono/abstractcore/lambda.hpp"
#include "fracmono/operators/operator.hpp"
#include "fracmono/series.hpp"
#include "fracmono/stepper/resolvent.hpp"

namespace fracmono::abstractcore {

/// Space-time norms with weight dt; the time exponent is the growth exponent p
/// of the operator (2 for the linear operator).
double spacetime_norm_H(const operators::MonotoneOperator& op, const NodalSeries& u, double dt);
double spacetime_norm_V(const operators::MonotoneOperator& op, const NodalSeries& u, double dt);
/// L^{p'} in time of the V*-norm.
double spacetime_norm_Vstar(const operators::MonotoneOperator& op, const NodalSeries& w, double dt);

/// A applied at every time node, row k at t = (k+1) dt.
NodalSeries apply_nodewise(const operators::MonotoneOperator& op, const NodalSeries& u, double dt);

struct YosidaState {
    double alpha = 0.0;
    NodalSeries u_alpha;
    /// Space-time H-norm of A u - Lambda_alpha u - f.
    double residual = 0.0;
    double norm_u = 0.0;
    double norm_Au = 0.0;
    /// ||alpha V_alpha u_alpha|| in the space-time V-norm.
    double norm_resolvent_u = 0.0;
    std::size_t newton_iters = 0;
};

/// Solves A u - Lambda_alpha u = f. Lambda_alpha is causal, so the system is
/// solved row by row; each row is a resolvent equation of A with
/// c = 1 / kappa, kappa = alpha dt^-beta / (alpha + dt^-beta).
/// Throws NonConvergence with alpha and the time row in the message.
YosidaState solve_regularized(const operators::MonotoneOperator& op, const DiscreteLambda& lambda, double alpha,
                              const NodalSeries& f, const stepper::SolverConfig& cfg = {});

struct ReferenceSolution {
    NodalSeries u;
    double residual = 0.0;
    std::size_t iterations = 0;
};

/// Solves A u - Lambda u = f by damped Newton on the full space-time system
/// with a dense Jacobian.
ReferenceSolution solve_reference(const operators::MonotoneOperator& op, const DiscreteLambda& lambda,
                                  const NodalSeries& f, const stepper::SolverConfig& cfg = {});

struct YosidaStudy {
    std::vector<YosidaState> states;
    /// Space-time H-norm of u_alpha - u*.
    std::vector<double> errors;
    ReferenceSolution reference;
    double norm_reference = 0.0;
    double sup_norm_u = 0.0;
    double sup_norm_Au = 0.0;
    /// Bounds from coercivity and growth, independent of alpha:
    /// delta x^p <= ||f||_{V*} x + g T and ||A u|| <= offset T^{1/p'} + C x^{p-1}.
    double apriori_bound_u = 0.0;
    double apriori_bound_Au = 0.0;
    bool bounded = false;
    /// First index from which the errors decrease strictly.
    std::size_t decreasing_from = 0;
    /// Observed constant of ||alpha V_alpha u_alpha|| <= C ||u_alpha||.
    double resolvent_constant = 0.0;
    /// Least-squares slope of log error against log alpha from decreasing_from on.
    double rate = 0.0;
};

/// Throws std::invalid_argument unless there are at least 3 positive,
/// strictly increasing alphas.
YosidaStudy yosida_convergence_study(const operators::MonotoneOperator& op, const DiscreteLambda& lambda,
                                     const NodalSeries& f, std::span<const double> alphas,
                                     const stepper::SolverConfig& cfg = {}, std::size_t threads = 1);

/// Columns alpha,residual,norm_u,norm_Au,err_vs_reference.
void write_study_csv(std::ostream& out, const YosidaStudy& study);

} // namespace fracmono::abstractcore
