#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fracmono::kernels {

/// I.i.d. draws of the one-sided beta-stable subordinator at time t,
/// normalised so that E[exp(-lambda S_t)] = exp(-t lambda^beta).
struct SubordinatorSample {
    double beta = 0.5;
    double t = 1.0;
    std::vector<double> values;
};

/// Kanter's exact representation: with U ~ Uniform(0, pi) and E ~ Exp(1),
///   S_1 = (A(U) / E)^((1-beta)/beta),
///   A(u) = sin(beta u)^(beta/(1-beta)) sin((1-beta) u) / sin(u)^(1/(1-beta)),
/// and S_t = t^(1/beta) S_1. Each draw consumes one uniform then one exponential
/// from a CounterRng seeded with `seed`.
SubordinatorSample sample_stable_subordinator(double beta, double t, std::size_t count, std::uint64_t seed);

/// Kanter's function A(u) above, exposed for tests.
double kanter_function(double beta, double u);

} // namespace fracmono::kernels
