#include "fracmono/abstractcore/yosida.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "fracmono/errors.hpp"

namespace fracmono::abstractcore {

namespace {

double time_exponent(const operators::MonotoneOperator& op) {
    try {
        return op.constants().exponent;
    } catch (const std::invalid_argument&) {
        return op.triple().p;
    }
}

double lp_in_time(const std::vector<double>& values, double q, double dt) {
    double s = 0.0;
    for (double v : values) s += std::pow(v, q);
    return std::pow(dt * s, 1.0 / q);
}

void check_shapes(const operators::MonotoneOperator& op, const DiscreteLambda& lambda, const NodalSeries& f) {
    if (f.n_nodes() != lambda.n_time()) throw std::invalid_argument("space-time forcing: wrong number of time rows");
    if (f.n_dof() != op.dim()) throw std::invalid_argument("space-time forcing: rows do not match the grid");
}

double time_of(std::size_t k, double dt) { return static_cast<double>(k + 1) * dt; }

NodalSeries difference(const NodalSeries& a, const NodalSeries& b) {
    NodalSeries d = a;
    for (std::size_t k = 0; k < d.flat().size(); ++k) d.flat()[k] -= b.flat()[k];
    return d;
}

} // namespace

double spacetime_norm_H(const operators::MonotoneOperator& op, const NodalSeries& u, double dt) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.n_nodes(); ++k) s += op.inner_H(u.row(k), u.row(k));
    return std::sqrt(dt * s);
}

double spacetime_norm_V(const operators::MonotoneOperator& op, const NodalSeries& u, double dt) {
    std::vector<double> v(u.n_nodes());
    for (std::size_t k = 0; k < u.n_nodes(); ++k) v[k] = op.norm_V(u.row(k));
    return lp_in_time(v, time_exponent(op), dt);
}

double spacetime_norm_Vstar(const operators::MonotoneOperator& op, const NodalSeries& w, double dt) {
    const double p = time_exponent(op);
    std::vector<double> v(w.n_nodes());
    for (std::size_t k = 0; k < w.n_nodes(); ++k) v[k] = op.norm_Vstar(w.row(k));
    return lp_in_time(v, p / (p - 1.0), dt);
}

NodalSeries apply_nodewise(const operators::MonotoneOperator& op, const NodalSeries& u, double dt) {
    NodalSeries out(u.n_nodes(), u.n_dof());
    for (std::size_t k = 0; k < u.n_nodes(); ++k) op.apply(time_of(k, dt), u.row(k), out.row(k));
    return out;
}

YosidaState solve_regularized(const operators::MonotoneOperator& op, const DiscreteLambda& lambda, double alpha,
                              const NodalSeries& f, const stepper::SolverConfig& cfg) {
    check_shapes(op, lambda, f);
    cfg.validate();
    const auto col = yosida_column(lambda, alpha);
    const double kappa = -col[0];
    const double dt = lambda.dt();
    const std::size_t m = op.dim();

    YosidaState state;
    state.alpha = alpha;
    state.u_alpha = NodalSeries(lambda.n_time(), m);
    std::vector<double> r(m);
    for (std::size_t k = 0; k < lambda.n_time(); ++k) {
        const auto fk = f.row(k);
        std::copy(fk.begin(), fk.end(), r.begin());
        for (std::size_t j = 1; j <= k; ++j) {
            const auto u = state.u_alpha.row(k - j);
            for (std::size_t i = 0; i < m; ++i) r[i] += col[j] * u[i];
        }
        for (auto& x : r) x /= kappa;
        try {
            const auto guess = k > 0 ? state.u_alpha.row(k - 1) : std::span<const double>{};
            const auto res = stepper::resolvent_solve(op, 1.0 / kappa, r, time_of(k, dt), cfg, guess);
            std::copy(res.u.begin(), res.u.end(), state.u_alpha.row(k).begin());
            state.newton_iters += res.iterations;
        } catch (const NonConvergence& e) {
            std::ostringstream msg;
            msg << "Yosida solve at alpha=" << alpha << ", time row " << k << ": " << e.what();
            NonConvergence err(msg.str(), e.last_residual(), e.iterations());
            err.node = k;
            throw err;
        }
    }

    const auto au = apply_nodewise(op, state.u_alpha, dt);
    const auto lu = apply_yosida(lambda, alpha, state.u_alpha);
    NodalSeries res = difference(au, lu);
    for (std::size_t k = 0; k < res.flat().size(); ++k) res.flat()[k] -= f.flat()[k];
    state.residual = spacetime_norm_H(op, res, dt);
    state.norm_u = spacetime_norm_V(op, state.u_alpha, dt);
    state.norm_Au = spacetime_norm_Vstar(op, au, dt);
    auto avu = resolvent(lambda, alpha, state.u_alpha);
    for (auto& x : avu.flat()) x *= alpha;
    state.norm_resolvent_u = spacetime_norm_V(op, avu, dt);
    return state;
}

ReferenceSolution solve_reference(const operators::MonotoneOperator& op, const DiscreteLambda& lambda,
                                  const NodalSeries& f, const stepper::SolverConfig& cfg) {
    check_shapes(op, lambda, f);
    cfg.validate();
    const std::size_t n = lambda.n_time();
    const std::size_t m = op.dim();
    const auto N = static_cast<Eigen::Index>(n * m);
    const auto& col = lambda.column();
    const double dt = lambda.dt();

    auto residual = [&](const NodalSeries& u) {
        NodalSeries g = difference(apply_nodewise(op, u, dt), lambda.apply(u));
        for (std::size_t k = 0; k < g.flat().size(); ++k) g.flat()[k] -= f.flat()[k];
        return g;
    };
    auto euclid = [](const NodalSeries& g) {
        double s = 0.0;
        for (double x : g.flat()) s += x * x;
        return std::sqrt(s);
    };

    ReferenceSolution sol;
    sol.u = NodalSeries(n, m);
    auto g = residual(sol.u);
    double gnorm = euclid(g);
    const double target = cfg.nonlinear_tol * std::max(1.0, euclid(f));
    while (gnorm > target) {
        if (sol.iterations >= cfg.max_newton)
            throw NonConvergence("reference Newton did not converge", gnorm, sol.iterations);
        ++sol.iterations;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
        for (std::size_t k = 0; k < n; ++k) {
            const auto jac = op.jacobian(time_of(k, dt), sol.u.row(k));
            const auto off = static_cast<Eigen::Index>(k * m);
            if (const auto* tri = std::get_if<operators::Tridiagonal>(&jac)) {
                for (std::size_t i = 0; i < m; ++i) {
                    const auto r = off + static_cast<Eigen::Index>(i);
                    J(r, r) += tri->diag[i];
                    if (i > 0) J(r, r - 1) += tri->lower[i];
                    if (i + 1 < m) J(r, r + 1) += tri->upper[i];
                }
            } else {
                const auto& d = std::get<Eigen::MatrixXd>(jac);
                J.block(off, off, d.rows(), d.cols()) += d;
            }
            for (std::size_t j = 0; j <= k; ++j) {
                const auto off_j = static_cast<Eigen::Index>((k - j) * m);
                for (std::size_t i = 0; i < m; ++i)
                    J(off + static_cast<Eigen::Index>(i), off_j + static_cast<Eigen::Index>(i)) -= col[j];
            }
        }
        const Eigen::Map<const Eigen::VectorXd> gv(g.flat().data(), N);
        const Eigen::VectorXd d = J.partialPivLu().solve(-gv);

        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40 && !accepted; ++h, s *= 0.5) {
            NodalSeries trial = sol.u;
            for (Eigen::Index k = 0; k < N; ++k) trial.flat()[static_cast<std::size_t>(k)] += s * d(k);
            auto gt = residual(trial);
            const double nt = euclid(gt);
            if (std::isfinite(nt) && nt < gnorm) {
                sol.u = std::move(trial);
                g = std::move(gt);
                gnorm = nt;
                accepted = true;
            }
        }
        if (!accepted) throw NonConvergence("reference Newton line search stalled", gnorm, sol.iterations);
    }
    sol.residual = spacetime_norm_H(op, g, dt);
    return sol;
}

YosidaStudy yosida_convergence_study(const operators::MonotoneOperator& op, const DiscreteLambda& lambda,
                                     const NodalSeries& f, std::span<const double> alphas,
                                     const stepper::SolverConfig& cfg, std::size_t threads) {
    if (alphas.size() < 3) throw std::invalid_argument("Yosida study: at least 3 values of alpha are required");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) throw std::invalid_argument("Yosida study: alpha must be positive");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw std::invalid_argument("Yosida study: alphas must be strictly increasing");
    }
    check_shapes(op, lambda, f);
    const double dt = lambda.dt();

    YosidaStudy study;
    study.reference = solve_reference(op, lambda, f, cfg);
    study.norm_reference = spacetime_norm_H(op, study.reference.u, dt);
    study.states.resize(alphas.size());

    const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, alphas.size());
    if (n_threads == 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) study.states[i] = solve_regularized(op, lambda, alphas[i], f, cfg);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(alphas.size());
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < n_threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < alphas.size(); i = next++) {
                        try {
                            study.states[i] = solve_regularized(op, lambda, alphas[i], f, cfg);
                        } catch (...) {
                            errors[i] = std::current_exception();
                        }
                    }
                });
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (const auto& s : study.states) {
        study.errors.push_back(spacetime_norm_H(op, difference(s.u_alpha, study.reference.u), dt));
        study.sup_norm_u = std::max(study.sup_norm_u, s.norm_u);
        study.sup_norm_Au = std::max(study.sup_norm_Au, s.norm_Au);
        if (s.norm_u > 0.0) study.resolvent_constant = std::max(study.resolvent_constant, s.norm_resolvent_u / s.norm_u);
    }

    const double T = static_cast<double>(lambda.n_time()) * dt;
    study.apriori_bound_u = std::numeric_limits<double>::infinity();
    study.apriori_bound_Au = std::numeric_limits<double>::infinity();
    try {
        const auto c = op.constants();
        const double p = c.exponent;
        if (c.delta > 0.0) {
            const double fn = spacetime_norm_Vstar(op, f, dt);
            const double gT = std::max(0.0, c.g) * T;
            auto excess = [&](double x) { return c.delta * std::pow(x, p) - fn * x - gT; };
            double lo = 0.0;
            double hi = 1.0;
            while (excess(hi) < 0.0) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (excess(mid) < 0.0 ? lo : hi) = mid;
            }
            study.apriori_bound_u = hi;
            study.apriori_bound_Au = c.growth_offset * std::pow(T, (p - 1.0) / p) + c.C * std::pow(hi, p - 1.0);
        }
    } catch (const std::invalid_argument&) {
    }
    constexpr double kSlack = 1e-8;
    study.bounded = std::isfinite(study.sup_norm_u) && std::isfinite(study.sup_norm_Au) &&
                    study.sup_norm_u <= study.apriori_bound_u * (1.0 + kSlack) &&
                    study.sup_norm_Au <= study.apriori_bound_Au * (1.0 + kSlack);

    study.decreasing_from = study.errors.size() - 1;
    while (study.decreasing_from > 0 && study.errors[study.decreasing_from] < study.errors[study.decreasing_from - 1])
        --study.decreasing_from;

    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    double count = 0.0;
    for (std::size_t i = study.decreasing_from; i < study.errors.size(); ++i) {
        if (!(study.errors[i] > 0.0)) continue;
        const double x = std::log(alphas[i]);
        const double y = std::log(study.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        count += 1.0;
    }
    if (count >= 2.0) study.rate = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return study;
}

void write_study_csv(std::ostream& out, const YosidaStudy& study) {
    char buf[160];
    out << "alpha,residual,norm_u,norm_Au,err_vs_reference\n";
    for (std::size_t i = 0; i < study.states.size(); ++i) {
        const auto& s = study.states[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.alpha, s.residual, s.norm_u, s.norm_Au,
                      study.errors[i]);
        out << buf;
    }
}

} // namespace fracmono::abstractcore
