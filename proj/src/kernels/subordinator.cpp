#include "fracmono/kernels/subordinator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracmono/kernels/random.hpp"

namespace fracmono::kernels {

double kanter_function(double beta, double u) {
    const double one_minus = 1.0 - beta;
    return std::pow(std::sin(beta * u), beta / one_minus) * std::sin(one_minus * u) /
           std::pow(std::sin(u), 1.0 / one_minus);
}

SubordinatorSample sample_stable_subordinator(double beta, double t, std::size_t count, std::uint64_t seed) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("sample_stable_subordinator: beta must lie in (0,1)");
    if (!(t > 0.0)) throw std::invalid_argument("sample_stable_subordinator: t must be positive");

    SubordinatorSample sample{beta, t, {}};
    sample.values.reserve(count);
    CounterRng rng(seed);
    const double exponent = (1.0 - beta) / beta;
    const double time_scale = std::pow(t, 1.0 / beta);
    while (sample.values.size() < count) {
        const double u = std::numbers::pi * rng.uniform_open();
        const double e = rng.exponential();
        const double s = time_scale * std::pow(kanter_function(beta, u) / e, exponent);
        // Underflow to 0 or overflow is possible only at the extreme tails of U; redraw.
        if (s > 0.0 && std::isfinite(s)) sample.values.push_back(s);
    }
    return sample;
}

} // namespace fracmono::kernels
