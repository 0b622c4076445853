#include "fracmono/stepper/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "fracmono/kernels/weights.hpp"

namespace fracmono::stepper {

namespace {

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.r2 = sxx > 0.0 && syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

} // namespace

double integral_equation_residual(const TrajectoryRecord& trajectory, const ProblemSpec& problem) {
    problem.validate();
    const auto op = operators::make_operator(problem.op, problem.triple);
    const std::size_t nodes = trajectory.states.n_nodes();
    const std::size_t dof = trajectory.states.n_dof();
    if (dof != op->dim()) throw std::invalid_argument("integral_equation_residual: trajectory does not match the grid");

    // A(u) - f on every node; row 0 is never read by the quadrature.
    NodalSeries drive(nodes, dof);
    std::vector<double> f(dof);
    for (std::size_t n = 1; n < nodes; ++n) {
        const double t = trajectory.times[n];
        auto row = drive.row(n);
        op->apply(t, trajectory.states.row(n), row);
        if (problem.forcing) {
            std::fill(f.begin(), f.end(), 0.0);
            problem.forcing(t, f);
            for (std::size_t i = 0; i < dof; ++i) row[i] -= f[i];
        }
    }
    const auto integral = kernels::fractional_integral(drive, trajectory.beta, trajectory.dt);

    double worst = 0.0;
    std::vector<double> res(dof);
    for (std::size_t n = 0; n < nodes; ++n) {
        const auto u = trajectory.states.row(n);
        const auto g = integral.row(n);
        for (std::size_t i = 0; i < dof; ++i) res[i] = u[i] - problem.x0[i] + g[i];
        worst = std::max(worst, op->norm_H(res));
    }
    return worst;
}

OrderEstimate estimate_order(const ProblemSpec& problem, const SolverConfig& cfg, std::span<const double> dts,
                             std::optional<std::vector<double>> reference) {
    if (dts.size() < 3) throw std::invalid_argument("estimate_order: need at least three step sizes");
    for (std::size_t i = 1; i < dts.size(); ++i)
        if (!(dts[i] < dts[i - 1])) throw std::invalid_argument("estimate_order: step sizes must decrease");
    problem.validate();
    const auto op = operators::make_operator(problem.op, problem.triple);

    std::vector<std::vector<double>> finals;
    for (double dt : dts) {
        SolverConfig c = cfg;
        c.dt = dt;
        const auto rec = march(*op, problem.beta, problem.T, problem.x0, problem.forcing, c);
        const auto last = rec.final_state();
        finals.emplace_back(last.begin(), last.end());
    }

    OrderEstimate est;
    std::vector<double> diff(problem.x0.size());
    auto distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
        return op->norm_H(diff);
    };
    if (reference) {
        if (reference->size() != problem.x0.size())
            throw std::invalid_argument("estimate_order: reference does not match the grid");
        for (std::size_t i = 0; i < dts.size(); ++i) {
            est.dts.push_back(dts[i]);
            est.errors.push_back(distance(finals[i], *reference));
        }
    } else {
        for (std::size_t i = 0; i + 1 < dts.size(); ++i) {
            est.dts.push_back(dts[i]);
            est.errors.push_back(distance(finals[i], finals[i + 1]));
        }
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < est.errors.size(); ++i) {
        if (i > 0 && !(est.errors[i] < est.errors[i - 1])) est.monotone = false;
        if (est.errors[i] > 0.0) {
            lx.push_back(std::log(est.dts[i]));
            ly.push_back(std::log(est.errors[i]));
        }
    }
    est.order = lx.size() >= 2 ? least_squares(lx, ly).slope : 0.0;
    return est;
}

DecayEstimate estimate_decay_exponent(const TrajectoryRecord& trajectory, double window) {
    if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("estimate_decay_exponent: window must lie in (0,1]");
    if (trajectory.times.size() < 2) throw std::domain_error("estimate_decay_exponent: trajectory too short");
    const double T = trajectory.times.back();
    const double start = T * (1.0 - window);
    std::vector<double> logt;
    std::vector<double> t;
    std::vector<double> logn;
    for (std::size_t n = 1; n < trajectory.times.size(); ++n) {
        if (trajectory.times[n] < start) continue;
        const double norm = trajectory.diagnostics[n].norm_H;
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::domain_error("estimate_decay_exponent: zero H-norm in the fitting window");
        t.push_back(trajectory.times[n]);
        logt.push_back(std::log(trajectory.times[n]));
        logn.push_back(std::log(norm));
    }
    if (t.size() < 3) throw std::domain_error("estimate_decay_exponent: fewer than three nodes in the window");
    const auto algebraic = least_squares(logt, logn);
    const auto exponential = least_squares(t, logn);
    DecayEstimate est;
    est.exponent = algebraic.slope;
    est.exponential_rate = exponential.slope;
    est.algebraic_r2 = algebraic.r2;
    est.exponential_r2 = exponential.r2;
    est.exponential = exponential.r2 > algebraic.r2;
    return est;
}

} // namespace fracmono::stepper
