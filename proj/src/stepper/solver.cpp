#include "fracmono/stepper/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "fracmono/errors.hpp"
#include "fracmono/kernels/gamma.hpp"

namespace fracmono::stepper {

void ProblemSpec::validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("problem: beta must lie in (0,1]");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("problem: T must be positive");
    triple.validate();
    if (x0.size() != triple.grid.n_interior) throw std::invalid_argument("problem: x0 does not match the grid");
    for (double x : x0)
        if (!std::isfinite(x)) throw std::invalid_argument("problem: x0 must be finite");
}

std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("step_count: T and dt must be positive");
    const double ratio = T / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::fabs(ratio - n) > 1e-9 * ratio)
        throw std::invalid_argument("T/dt must be a positive integer (a final partial step is not allowed)");
    return static_cast<std::size_t>(n);
}

TrajectoryRecord march(const operators::MonotoneOperator& op, double beta, double T, std::span<const double> x0,
                       const Forcing& forcing, const SolverConfig& cfg) {
    cfg.validate();
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("march: beta must lie in (0,1]");
    if (x0.size() != op.dim()) throw std::invalid_argument("march: x0 does not match the grid");
    const std::size_t n_steps = step_count(T, cfg.dt);
    const std::size_t dof = x0.size();
    const double dt = cfg.dt;
    const auto scheme = beta == 1.0 ? kernels::MemoryScheme::GrunwaldLetnikov : cfg.scheme;

    TrajectoryRecord rec;
    rec.beta = beta;
    rec.dt = dt;
    rec.scheme = scheme;
    rec.times.resize(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) rec.times[n] = static_cast<double>(n) * dt;
    rec.states = NodalSeries(n_steps + 1, dof);
    rec.diagnostics.resize(n_steps + 1);
    std::copy(x0.begin(), x0.end(), rec.states.row(0).begin());
    rec.diagnostics[0].norm_H = op.norm_H(x0);
    rec.diagnostics[0].norm_V = op.norm_V(x0);

    const auto weights = kernels::make_memory_weights(scheme, beta, dt, n_steps);
    const auto& w = weights.coeffs;
    // c is the resolvent parameter, `fscale` multiplies f in r.
    const double c = scheme == kernels::MemoryScheme::L1 ? std::pow(dt, beta) * kernels::gamma(2.0 - beta)
                                                         : std::pow(dt, beta);
    double weight_sum = 1.0; // sum_{k<=n} w_k for GL

    std::vector<double> r(dof);
    std::vector<double> f(dof);
    std::vector<double> au(dof);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        const double t = rec.times[n];
        std::fill(f.begin(), f.end(), 0.0);
        if (forcing) forcing(t, f);

        std::fill(r.begin(), r.end(), 0.0);
        if (scheme == kernels::MemoryScheme::L1) {
            if (n == 1) {
                const auto u0 = rec.states.row(0);
                for (std::size_t i = 0; i < dof; ++i) r[i] = u0[i];
            } else {
                auto add = [&](double coeff, std::size_t node) {
                    const auto row = rec.states.row(node);
                    for (std::size_t i = 0; i < dof; ++i) r[i] += coeff * row[i];
                };
                add(1.0 - w[1], n - 1);
                for (std::size_t k = 1; k + 1 < n; ++k) add(w[k] - w[k + 1], n - 1 - k);
                add(w[n - 1], 0);
            }
        } else {
            for (std::size_t k = 1; k <= n; ++k) {
                const auto row = rec.states.row(n - k);
                for (std::size_t i = 0; i < dof; ++i) r[i] += -w[k] * row[i];
            }
            weight_sum += w[n];
            for (std::size_t i = 0; i < dof; ++i) r[i] += weight_sum * x0[i];
        }
        for (std::size_t i = 0; i < dof; ++i) r[i] += c * f[i];

        ResolventResult step;
        try {
            step = resolvent_solve(op, c, r, t, cfg, rec.states.row(n - 1));
        } catch (NonConvergence& e) {
            e.node = n;
            throw;
        }
        std::copy(step.u.begin(), step.u.end(), rec.states.row(n).begin());

        auto& diag = rec.diagnostics[n];
        diag.newton_iters = step.iterations;
        diag.residual = step.residual;
        diag.norm_H = op.norm_H(step.u);
        diag.norm_V = op.norm_V(step.u);
        op.apply(t, step.u, au);
        for (std::size_t i = 0; i < dof; ++i) au[i] = f[i] - au[i];
        diag.memory_increment = dt * op.norm_H(au);
    }
    return rec;
}

TrajectoryRecord solve_deterministic(const ProblemSpec& problem, const SolverConfig& cfg) {
    problem.validate();
    const auto op = operators::make_operator(problem.op, problem.triple);
    return march(*op, problem.beta, problem.T, problem.x0, problem.forcing, cfg);
}

} // namespace fracmono::stepper
