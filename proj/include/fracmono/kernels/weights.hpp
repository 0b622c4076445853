#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fracmono/series.hpp"

namespace fracmono::kernels {

enum class MemoryScheme { GrunwaldLetnikov, L1 };

std::string_view to_string(MemoryScheme scheme);
MemoryScheme memory_scheme_from_string(std::string_view name);

/// Convolution coefficients of a discrete fractional derivative.
///
/// GrunwaldLetnikov: coeffs[k] = (-1)^k binom(beta, k), so coeffs[0] = 1 and
/// coeffs[k] < 0 for k >= 1 when beta < 1.
/// L1: coeffs[j] = (j+1)^(1-beta) - j^(1-beta), positive and decreasing.
struct MemoryWeights {
    MemoryScheme scheme = MemoryScheme::L1;
    double beta = 1.0;
    double dt = 1.0;
    std::vector<double> coeffs;
};

/// Grunwald-Letnikov weights w_0..w_n from w_k = w_{k-1} (1 - (beta+1)/k).
/// Throws std::invalid_argument unless 0 < beta <= 1.
std::vector<double> grunwald_weights(double beta, std::size_t n);

/// L1 coefficients b_0..b_n. Throws std::invalid_argument unless 0 < beta < 1;
/// beta = 1 must use the Grunwald-Letnikov scheme.
std::vector<double> l1_coefficients(double beta, std::size_t n);

MemoryWeights make_memory_weights(MemoryScheme scheme, double beta, double dt, std::size_t n);

/// Product-rectangle quadrature of (g_beta * f)(t_n) with right-endpoint
/// sampling; row 0 of the input is never read and row 0 of the output is 0.
NodalSeries fractional_integral(const NodalSeries& samples, double beta, double dt);

/// Quadrature weights q_1..q_n of fractional_integral (q_0 = 0):
/// q_k = dt^beta / Gamma(1+beta) * (k^beta - (k-1)^beta).
std::vector<double> fractional_integral_weights(double beta, double dt, std::size_t n);

/// Discrete d/dt (g_{1-beta} * (u - x0)). The state at t = 0 is taken to be x0,
/// so row 0 of `samples` does not enter; output row 0 is 0.
NodalSeries caputo_derivative(const NodalSeries& samples, std::span<const double> x0, double beta, double dt,
                              MemoryScheme scheme = MemoryScheme::L1);

} // namespace fracmono::kernels
