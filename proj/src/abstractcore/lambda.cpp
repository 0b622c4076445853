#include "fracmono/abstractcore/lambda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fracmono/kernels/random.hpp"
#include "fracmono/kernels/weights.hpp"

namespace fracmono::abstractcore {

DiscreteLambda::DiscreteLambda(double beta, double dt, std::size_t n_time) : beta_(beta), dt_(dt) {
    if (n_time == 0) throw std::invalid_argument("discrete lambda: n_time must be at least 1");
    if (!(dt > 0.0)) throw std::invalid_argument("discrete lambda: dt must be positive");
    column_ = kernels::grunwald_weights(beta, n_time - 1);
    const double scale = -std::pow(dt, -beta);
    for (auto& w : column_) w *= scale;
}

NodalSeries DiscreteLambda::apply(const NodalSeries& u) const { return toeplitz_apply(column_, u); }

DiscreteLambda build_discrete_lambda(double beta, double dt, std::size_t n_time) {
    return DiscreteLambda(beta, dt, n_time);
}

NodalSeries toeplitz_apply(std::span<const double> column, const NodalSeries& u) {
    if (u.n_nodes() != column.size()) throw std::invalid_argument("toeplitz_apply: length mismatch");
    NodalSeries out(u.n_nodes(), u.n_dof());
    for (std::size_t k = 0; k < u.n_nodes(); ++k) {
        auto y = out.row(k);
        for (std::size_t j = 0; j <= k; ++j) {
            const auto x = u.row(k - j);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += column[j] * x[i];
        }
    }
    return out;
}

NodalSeries toeplitz_solve(std::span<const double> column, const NodalSeries& v) {
    if (v.n_nodes() != column.size()) throw std::invalid_argument("toeplitz_solve: length mismatch");
    if (column.empty() || column[0] == 0.0) throw std::invalid_argument("toeplitz_solve: singular diagonal");
    NodalSeries w(v.n_nodes(), v.n_dof());
    for (std::size_t k = 0; k < v.n_nodes(); ++k) {
        auto y = w.row(k);
        const auto rhs = v.row(k);
        std::copy(rhs.begin(), rhs.end(), y.begin());
        for (std::size_t j = 1; j <= k; ++j) {
            const auto x = w.row(k - j);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= column[j] * x[i];
        }
        for (auto& x : y) x /= column[0];
    }
    return w;
}

namespace {

std::vector<double> shifted_column(const DiscreteLambda& lambda, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("resolvent: alpha must be positive");
    std::vector<double> a(lambda.column().size());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = -lambda.column()[j];
    a[0] += alpha;
    return a;
}

} // namespace

NodalSeries resolvent(const DiscreteLambda& lambda, double alpha, const NodalSeries& v) {
    return toeplitz_solve(shifted_column(lambda, alpha), v);
}

std::vector<double> resolvent_column(const DiscreteLambda& lambda, double alpha) {
    NodalSeries impulse(lambda.n_time(), 1);
    impulse(0, 0) = 1.0;
    const auto w = resolvent(lambda, alpha, impulse);
    return {w.flat().begin(), w.flat().end()};
}

std::vector<double> yosida_column(const DiscreteLambda& lambda, double alpha) {
    auto col = resolvent_column(lambda, alpha);
    for (auto& x : col) x *= alpha * alpha;
    // alpha^2/(alpha + dt^-beta) - alpha, written without cancellation.
    const double d = -lambda.column()[0];
    col[0] = -alpha * d / (alpha + d);
    return col;
}

NodalSeries apply_yosida(const DiscreteLambda& lambda, double alpha, const NodalSeries& u) {
    return toeplitz_apply(yosida_column(lambda, alpha), u);
}

double flat_inner(const NodalSeries& a, const NodalSeries& b) {
    if (a.flat().size() != b.flat().size()) throw std::invalid_argument("flat_inner: size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.flat().size(); ++k) s += a.flat()[k] * b.flat()[k];
    return s;
}

double max_dissipativity(std::span<const double> column, std::size_t n_dof, std::size_t samples,
                         std::uint64_t seed) {
    kernels::GaussianStream g(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        NodalSeries u(column.size(), n_dof);
        for (auto& x : u.flat()) x = g.next();
        const double uu = flat_inner(u, u);
        if (uu == 0.0) continue;
        worst = std::max(worst, flat_inner(toeplitz_apply(column, u), u) / uu);
    }
    return worst;
}

double resolvent_contraction(const DiscreteLambda& lambda, double alpha, std::size_t iterations) {
    const auto a = shifted_column(lambda, alpha);
    const std::size_t n = a.size();
    std::vector<double> x(n, 1.0);
    std::vector<double> y(n);
    std::vector<double> z(n);
    double estimate = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        double nx = 0.0;
        for (double v : x) nx += v * v;
        nx = std::sqrt(nx);
        for (auto& v : x) v /= nx;
        // y = alpha (alpha - Lambda)^-1 x
        for (std::size_t k = 0; k < n; ++k) {
            double s = x[k];
            for (std::size_t j = 1; j <= k; ++j) s -= a[j] * y[k - j];
            y[k] = s / a[0];
        }
        for (auto& v : y) v *= alpha;
        double ny = 0.0;
        for (double v : y) ny += v * v;
        estimate = std::sqrt(ny);
        // z = alpha (alpha - Lambda)^-T y
        for (std::size_t k = n; k-- > 0;) {
            double s = y[k];
            for (std::size_t j = 1; k + j < n; ++j) s -= a[j] * z[k + j];
            z[k] = s / a[0];
        }
        for (std::size_t k = 0; k < n; ++k) x[k] = alpha * z[k];
    }
    return estimate;
}

std::complex<double> discrete_symbol(double beta, double dt, double omega) {
    const std::complex<double> z = 1.0 - std::exp(std::complex<double>(0.0, -omega * dt));
    if (z == 0.0) return 0.0;
    return -std::pow(z, beta) / std::pow(dt, beta);
}

std::complex<double> continuum_symbol(double beta, double omega) {
    if (omega == 0.0) return 0.0;
    const double phase = beta * std::numbers::pi / 2.0 * (omega > 0.0 ? 1.0 : -1.0);
    return -std::pow(std::fabs(omega), beta) * std::complex<double>(std::cos(phase), std::sin(phase));
}

double symbol_error(double beta, double dt, std::span<const double> omegas) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("symbol_error: beta must lie in (0,1]");
    if (!(dt > 0.0)) throw std::invalid_argument("symbol_error: dt must be positive");
    if (std::cos(beta * std::numbers::pi / 2.0) < -1e-15)
        throw std::logic_error("symbol_error: negative real part of the continuum symbol");
    double worst = 0.0;
    for (double omega : omegas) {
        if (!(std::fabs(omega) * dt < std::numbers::pi))
            throw std::invalid_argument("symbol_error: frequency beyond Nyquist");
        if (omega == 0.0) continue;
        const auto c = continuum_symbol(beta, omega);
        worst = std::max(worst, std::abs(discrete_symbol(beta, dt, omega) - c) / std::abs(c));
    }
    return worst;
}

} // namespace fracmono::abstractcore
