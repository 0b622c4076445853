#include "fracmono/stochastic/noise.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fracmono/kernels/gamma.hpp"
#include "fracmono/kernels/random.hpp"

namespace fracmono::stochastic {

std::string_view to_string(NoiseRegularity r) {
    return r == NoiseRegularity::BoundedInTime ? "bounded" : "square_integrable";
}

NoiseRegularity noise_regularity_from_string(std::string_view name) {
    if (name == "bounded") return NoiseRegularity::BoundedInTime;
    if (name == "square_integrable") return NoiseRegularity::SquareIntegrableInTime;
    throw std::invalid_argument("unknown noise regularity '" + std::string(name) +
                                "' (expected bounded or square_integrable)");
}

NoiseValidation validate_noise(double beta, const NoiseSpec& noise) {
    std::ostringstream why;
    const double g = noise.gamma;
    if (!(g > 0.0 && g <= 1.0)) {
        why << "gamma must lie in (0,1] (got gamma=" << g << ")";
        return {false, why.str()};
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
        why << "beta must lie in (0,1] (got beta=" << beta << ")";
        return {false, why.str()};
    }
    if (noise.regularity == NoiseRegularity::BoundedInTime) {
        if (!(g < beta + 0.5)) {
            why << "gamma < beta + 1/2 is required for bounded B (got gamma=" << g << ", beta + 1/2=" << beta + 0.5
                << ")";
            return {false, why.str()};
        }
    } else if (!(g <= beta)) {
        why << "gamma <= beta is required for square-integrable B (got gamma=" << g << ", beta=" << beta << ")";
        return {false, why.str()};
    }
    for (const auto& b : noise.B) {
        if (b.rows() != noise.B.front().rows() || b.cols() != noise.B.front().cols())
            return {false, "all B(t_j) must have the same shape"};
        if (!b.allFinite()) return {false, "B must be finite"};
    }
    return {};
}

NodalSeries wiener_increments(std::size_t modes, double dt, std::size_t n_steps, std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("wiener_increments: dt must be positive");
    kernels::GaussianStream gauss(seed);
    NodalSeries dw(n_steps, modes);
    const double s = std::sqrt(dt);
    for (auto& x : dw.flat()) x = s * gauss.next();
    return dw;
}

std::vector<double> convolution_kernel(double exponent, double dt, std::size_t n_steps) {
    if (!(exponent > -1.0)) throw std::invalid_argument("convolution_kernel: exponent must exceed -1");
    std::vector<double> k(n_steps + 1, 0.0);
    const double e1 = exponent + 1.0;
    const double scale = std::pow(dt, exponent) / e1;
    for (std::size_t lag = 1; lag <= n_steps; ++lag) {
        const double x = static_cast<double>(lag);
        k[lag] = scale * (std::pow(x, e1) - std::pow(x - 1.0, e1));
    }
    return k;
}

NodalSeries fractional_convolution_path(const NoiseSpec& noise, double beta, double dt,
                                        const NodalSeries& increments) {
    if (const auto gate = validate_noise(beta, noise); !gate) throw std::invalid_argument(gate.reason);
    if (noise.B.empty()) throw std::invalid_argument("noise: B is empty");
    const std::size_t n_steps = increments.n_nodes();
    if (noise.B.size() != 1 && noise.B.size() < n_steps)
        throw std::invalid_argument("noise: time-dependent B needs one matrix per step");
    if (increments.n_dof() != noise.modes()) throw std::invalid_argument("noise: increments do not match B columns");
    const std::size_t dof = noise.dof();
    const double e = beta - noise.gamma;
    const auto kernel = convolution_kernel(e, dt, n_steps);
    const double norm = 1.0 / kernels::gamma(1.0 + e);

    // G_j = B(t_j) dW_j
    NodalSeries g(n_steps, dof);
    for (std::size_t j = 0; j < n_steps; ++j) {
        const auto dw = increments.row(j);
        Eigen::Map<Eigen::VectorXd>(g.row(j).data(), static_cast<Eigen::Index>(dof)) =
            noise.at_step(j) * Eigen::Map<const Eigen::VectorXd>(dw.data(), static_cast<Eigen::Index>(dw.size()));
    }
    NodalSeries f(n_steps + 1, dof);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        auto out = f.row(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = norm * kernel[n - j];
            const auto src = g.row(j);
            for (std::size_t i = 0; i < dof; ++i) out[i] += w * src[i];
        }
    }
    return f;
}

NodalSeries fractional_convolution_path(const NoiseSpec& noise, double beta, double dt, std::size_t n_steps,
                                        std::uint64_t seed) {
    if (const auto gate = validate_noise(beta, noise); !gate) throw std::invalid_argument(gate.reason);
    return fractional_convolution_path(noise, beta, dt, wiener_increments(noise.modes(), dt, n_steps, seed));
}

double convolution_variance(double beta, double gamma, double b, double t) {
    const double e = beta - gamma;
    if (!(2.0 * e + 1.0 > 0.0)) return std::numeric_limits<double>::infinity();
    const double g = kernels::gamma(1.0 + e);
    return b * b * std::pow(t, 2.0 * e + 1.0) / ((2.0 * e + 1.0) * g * g);
}

} // namespace fracmono::stochastic
