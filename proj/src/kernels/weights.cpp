#include "fracmono/kernels/weights.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fracmono/kernels/gamma.hpp"

namespace fracmono::kernels {

std::string_view to_string(MemoryScheme scheme) {
    return scheme == MemoryScheme::L1 ? "L1" : "GL";
}

MemoryScheme memory_scheme_from_string(std::string_view name) {
    if (name == "L1") return MemoryScheme::L1;
    if (name == "GL" || name == "GrunwaldLetnikov") return MemoryScheme::GrunwaldLetnikov;
    throw std::invalid_argument("unknown memory scheme '" + std::string(name) + "' (expected L1 or GL)");
}

std::vector<double> grunwald_weights(double beta, std::size_t n) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("grunwald_weights: beta must lie in (0,1]");
    std::vector<double> w(n + 1);
    w[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) w[k] = w[k - 1] * (1.0 - (beta + 1.0) / static_cast<double>(k));
    return w;
}

std::vector<double> l1_coefficients(double beta, std::size_t n) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("l1_coefficients: beta must lie in (0,1); use the GL scheme for beta = 1");
    const double a = 1.0 - beta;
    std::vector<double> b(n + 1);
    b[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double x = static_cast<double>(j);
        // (j+1)^a - j^a = j^a (exp(a log(1 + 1/j)) - 1), free of cancellation for large j
        b[j] = std::pow(x, a) * std::expm1(a * std::log1p(1.0 / x));
    }
    return b;
}

MemoryWeights make_memory_weights(MemoryScheme scheme, double beta, double dt, std::size_t n) {
    if (!(dt > 0.0)) throw std::invalid_argument("make_memory_weights: dt must be positive");
    MemoryWeights mw{scheme, beta, dt, {}};
    mw.coeffs = scheme == MemoryScheme::L1 ? l1_coefficients(beta, n) : grunwald_weights(beta, n);
    return mw;
}

std::vector<double> fractional_integral_weights(double beta, double dt, std::size_t n) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("fractional_integral: beta must lie in (0,1]");
    if (!(dt > 0.0)) throw std::invalid_argument("fractional_integral: dt must be positive");
    std::vector<double> q(n + 1, 0.0);
    const double scale = std::pow(dt, beta) / gamma(1.0 + beta);
    for (std::size_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k);
        q[k] = scale * (std::pow(x, beta) - std::pow(x - 1.0, beta));
    }
    return q;
}

NodalSeries fractional_integral(const NodalSeries& samples, double beta, double dt) {
    const std::size_t n_nodes = samples.n_nodes();
    const std::size_t dof = samples.n_dof();
    NodalSeries out(n_nodes, dof);
    if (n_nodes == 0) {
        fractional_integral_weights(beta, dt, 0);
        return out;
    }
    const auto q = fractional_integral_weights(beta, dt, n_nodes - 1);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        auto dst = out.row(n);
        for (std::size_t j = 1; j <= n; ++j) {
            const double weight = q[n - j + 1];
            const auto src = samples.row(j);
            for (std::size_t i = 0; i < dof; ++i) dst[i] += weight * src[i];
        }
    }
    return out;
}

NodalSeries caputo_derivative(const NodalSeries& samples, std::span<const double> x0, double beta, double dt,
                              MemoryScheme scheme) {
    if (!(dt > 0.0)) throw std::invalid_argument("caputo_derivative: dt must be positive");
    if (x0.size() != samples.n_dof())
        throw std::invalid_argument("caputo_derivative: initial state length does not match the samples");
    const std::size_t n_nodes = samples.n_nodes();
    const std::size_t dof = samples.n_dof();
    NodalSeries out(n_nodes, dof);
    if (n_nodes == 0) return out;

    // v_j = u_j - x0 for j >= 1, v_0 = 0
    auto shifted = [&](std::size_t j, std::size_t i) { return j == 0 ? 0.0 : samples(j, i) - x0[i]; };

    if (scheme == MemoryScheme::GrunwaldLetnikov) {
        const auto w = grunwald_weights(beta, n_nodes - 1);
        const double scale = std::pow(dt, -beta);
        for (std::size_t n = 1; n < n_nodes; ++n)
            for (std::size_t i = 0; i < dof; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += w[k] * shifted(n - k, i);
                out(n, i) = scale * acc;
            }
        return out;
    }

    const auto b = l1_coefficients(beta, n_nodes - 1);
    const double scale = std::pow(dt, -beta) / gamma(2.0 - beta);
    for (std::size_t n = 1; n < n_nodes; ++n)
        for (std::size_t i = 0; i < dof; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += b[n - 1 - j] * (shifted(j + 1, i) - shifted(j, i));
            out(n, i) = scale * acc;
        }
    return out;
}

} // namespace fracmono::kernels
