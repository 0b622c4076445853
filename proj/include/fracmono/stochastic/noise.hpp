#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fracmono/series.hpp"

namespace fracmono::stochastic {

enum class NoiseRegularity { BoundedInTime, SquareIntegrableInTime };

std::string_view to_string(NoiseRegularity r);
NoiseRegularity noise_regularity_from_string(std::string_view name);

/// Additive noise d^gamma/dt^gamma int_0^t B(s) dW(s) with W a standard
/// Wiener process on R^m.
struct NoiseSpec {
    double gamma = 1.0;
    /// B(t_j) as n_dof x m matrices: a single entry is constant in time,
    /// otherwise one entry per step j = 0..n_steps-1.
    std::vector<Eigen::MatrixXd> B;
    NoiseRegularity regularity = NoiseRegularity::BoundedInTime;

    [[nodiscard]] std::size_t modes() const { return B.empty() ? 0 : static_cast<std::size_t>(B.front().cols()); }
    [[nodiscard]] std::size_t dof() const { return B.empty() ? 0 : static_cast<std::size_t>(B.front().rows()); }
    [[nodiscard]] const Eigen::MatrixXd& at_step(std::size_t j) const { return B.size() == 1 ? B.front() : B.at(j); }
};

struct NoiseValidation {
    bool ok = true;
    std::string reason;
    explicit operator bool() const noexcept { return ok; }
};

/// Accepts iff gamma in (0, 1] and either gamma < beta + 1/2 with bounded B or
/// gamma <= beta with square-integrable B. The reason names the violated gate.
NoiseValidation validate_noise(double beta, const NoiseSpec& noise);

/// Increments dW_0..dW_{n-1} (rows), each N(0, dt I_m). Drawn from
/// GaussianStream(seed) in row-major order and scaled by sqrt(dt).
NodalSeries wiener_increments(std::size_t modes, double dt, std::size_t n_steps, std::uint64_t seed);

/// Step-averaged kernel dt^-1 int_{t_j}^{t_{j+1}} (t_n - s)^e ds for lag
/// k = n - j >= 1: dt^e (k^(e+1) - (k-1)^(e+1)) / (e+1). Requires e > -1.
std::vector<double> convolution_kernel(double exponent, double dt, std::size_t n_steps);

/// F(t_n) = 1/Gamma(1+beta-gamma) sum_{j<n} K_{n-j} B(t_j) dW_j, F(0) = 0.
/// Throws std::invalid_argument when the gate rejects the noise.
NodalSeries fractional_convolution_path(const NoiseSpec& noise, double beta, double dt, std::size_t n_steps,
                                        std::uint64_t seed);

/// Same path from given increments.
NodalSeries fractional_convolution_path(const NoiseSpec& noise, double beta, double dt,
                                        const NodalSeries& increments);

/// Var of the scalar F(t) for constant b: b^2 t^(2e+1) / ((2e+1) Gamma(1+e)^2), e = beta - gamma.
double convolution_variance(double beta, double gamma, double b, double t);

} // namespace fracmono::stochastic
