#include "fracmono/stepper/resolvent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracmono/errors.hpp"

namespace fracmono::stepper {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    if (!(nonlinear_tol > 0.0)) throw std::invalid_argument("solver: nonlinear_tol must be positive");
    if (max_newton == 0) throw std::invalid_argument("solver: max_newton must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("solver: damping must lie in (0,1]");
}

namespace {

using operators::MonotoneOperator;

class ResolventProblem {
public:
    ResolventProblem(const MonotoneOperator& op, double c, std::span<const double> r, double t)
        : op_(op), c_(c), r_(r), t_(t), au_(r.size()) {}

    // F(u) = u + c A(u) - r
    std::vector<double> residual(std::span<const double> u) const {
        op_.apply(t_, u, au_);
        std::vector<double> f(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) f[i] = u[i] + c_ * au_[i] - r_[i];
        return f;
    }

    double energy(std::span<const double> u) const {
        std::vector<double> d(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - r_[i];
        return 0.5 * op_.inner_H(d, d) + c_ * op_.potential(t_, u);
    }

    // Solves (I + c dA) d = -f.
    std::vector<double> newton_direction(std::span<const double> u, std::span<const double> f) const {
        const auto jac = op_.jacobian(t_, u);
        std::vector<double> rhs(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
        if (const auto* tri = std::get_if<operators::Tridiagonal>(&jac)) {
            operators::Tridiagonal m = *tri;
            for (std::size_t i = 0; i < m.size(); ++i) {
                m.lower[i] *= c_;
                m.upper[i] *= c_;
                m.diag[i] = 1.0 + c_ * m.diag[i];
            }
            return operators::thomas_solve(m, rhs);
        }
        const auto& dense = std::get<Eigen::MatrixXd>(jac);
        const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dense.rows(), dense.cols()) + c_ * dense;
        const Eigen::VectorXd sol =
            m.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size())));
        return {sol.data(), sol.data() + sol.size()};
    }

    double norm(std::span<const double> v) const { return op_.norm_H(v); }
    double inner(std::span<const double> a, std::span<const double> b) const { return op_.inner_H(a, b); }

private:
    const MonotoneOperator& op_;
    double c_;
    std::span<const double> r_;
    double t_;
    mutable std::vector<double> au_;
};

bool finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

std::vector<double> axpy(std::span<const double> u, double s, std::span<const double> d) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + s * d[i];
    return out;
}

} // namespace

ResolventResult resolvent_solve(const operators::MonotoneOperator& op, double c, std::span<const double> r, double t,
                                const SolverConfig& cfg, std::span<const double> guess) {
    if (!(c > 0.0)) throw std::invalid_argument("resolvent_step: c must be positive");
    if (r.size() != op.dim()) throw std::invalid_argument("resolvent_step: r does not match the grid");
    if (!guess.empty() && guess.size() != r.size()) throw std::invalid_argument("resolvent_step: guess length mismatch");
    const ResolventProblem problem(op, c, r, t);

    ResolventResult result;
    result.u.assign(guess.empty() ? r.begin() : guess.begin(), guess.empty() ? r.end() : guess.end());
    const double target = cfg.nonlinear_tol * std::max(1.0, problem.norm(r));
    auto f = problem.residual(result.u);
    result.residual = problem.norm(f);

    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 40;
    while (result.residual > target) {
        if (result.iterations >= cfg.max_newton) {
            std::ostringstream msg;
            msg << "resolvent Newton did not converge in " << cfg.max_newton << " iterations (residual "
                << result.residual << ")";
            throw NonConvergence(msg.str(), result.residual, result.iterations);
        }
        ++result.iterations;

        std::vector<double> d;
        bool newton_ok = true;
        try {
            d = problem.newton_direction(result.u, f);
            newton_ok = finite(d);
        } catch (const std::runtime_error&) {
            newton_ok = false;
        }

        bool accepted = false;
        if (newton_ok) {
            auto trial = axpy(result.u, cfg.damping, d);
            auto ftrial = problem.residual(trial);
            const double rtrial = problem.norm(ftrial);
            if (finite(ftrial) && rtrial < result.residual) {
                result.u = std::move(trial);
                f = std::move(ftrial);
                result.residual = rtrial;
                accepted = true;
            }
        }
        // Backtracking on the energy along Newton, then along -F.
        for (int attempt = newton_ok ? 0 : 1; !accepted && attempt < 2; ++attempt) {
            if (attempt == 1) {
                d.assign(f.size(), 0.0);
                for (std::size_t i = 0; i < f.size(); ++i) d[i] = -f[i];
            }
            const double slope = problem.inner(f, d);
            if (!(slope < 0.0)) continue;
            const double e0 = problem.energy(result.u);
            double s = cfg.damping;
            for (int k = 0; k < kMaxHalvings; ++k, s *= 0.5) {
                auto trial = axpy(result.u, s, d);
                const double e = problem.energy(trial);
                if (std::isfinite(e) && e <= e0 + kArmijo * s * slope) {
                    result.u = std::move(trial);
                    f = problem.residual(result.u);
                    result.residual = problem.norm(f);
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "resolvent line search stalled (residual " << result.residual << ")";
            throw NonConvergence(msg.str(), result.residual, result.iterations);
        }
    }
    // One extra Newton step past the tolerance, kept if it lowers the residual.
    if (result.iterations > 0) {
        try {
            const auto d = problem.newton_direction(result.u, f);
            auto trial = axpy(result.u, 1.0, d);
            auto ftrial = problem.residual(trial);
            const double rtrial = problem.norm(ftrial);
            if (finite(trial) && rtrial < result.residual) {
                result.u = std::move(trial);
                result.residual = rtrial;
                ++result.iterations;
            }
        } catch (const std::runtime_error&) {
        }
    }
    return result;
}

std::vector<double> resolvent_step(const operators::MonotoneOperator& op, double c, std::span<const double> r,
                                   double t, const SolverConfig& cfg) {
    return resolvent_solve(op, c, r, t, cfg).u;
}

} // namespace fracmono::stepper
