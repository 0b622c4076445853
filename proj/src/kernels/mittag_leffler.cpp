#include "fracmono/kernels/mittag_leffler.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fracmono::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

double series(double beta, double z) {
    const long double lz = z;
    const long double log_abs = std::log(std::fabs(lz));
    long double sum = 1.0L;
    for (int k = 1; k < 100000; ++k) {
        const long double kk = k;
        const long double log_term = kk * log_abs - std::lgamma(static_cast<long double>(beta) * kk + 1.0L);
        if (log_term > 11356.0L) throw std::overflow_error("mittag_leffler: series term overflow");
        long double term = std::exp(log_term);
        if (z < 0.0 && (k % 2 == 1)) term = -term;
        sum += term;
        // Terms decrease monotonically once beta k + 1 passes the Gamma growth point.
        if (std::fabs(term) < 1e-21L * std::fabs(sum) && kk * beta > 2.0L && log_term < 0.0L) break;
    }
    const double out = static_cast<double>(sum);
    if (!std::isfinite(out)) throw std::overflow_error("mittag_leffler: result exceeds double range");
    return out;
}

double reciprocal_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x < 0.5) return std::tgamma(1.0 - x) * std::sin(kPi * x) / kPi;
    return 1.0 / std::tgamma(x);
}

/// -sum_{k>=1} z^-k / Gamma(1 - beta k), truncated at the smallest term.
double asymptotic_tail(double beta, double z) {
    double sum = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double term = -std::pow(z, -k) * reciprocal_gamma(1.0 - beta * k);
        const double magnitude = std::fabs(term);
        if (magnitude == 0.0) continue; // 1/Gamma vanishes at non-positive integers
        if (magnitude > previous && magnitude != 0.0) break;
        sum += term;
        previous = magnitude;
        if (magnitude < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

/// E_beta(-x) = sin(beta pi)/(beta pi) int_0^inf exp(-t s^(1/beta)) / (s^2 + 2 s cos(beta pi) + 1) ds,
/// t = x^(1/beta). The integrand is smooth; it peaks near s = -cos(beta pi) and is
/// below e^-60 relative to its peak past s = (60/t)^beta.
double laplace_representation(double beta, double x) {
    const double t = std::pow(x, 1.0 / beta);
    const double c = std::cos(beta * kPi);
    auto integrand = [&](double s) {
        const double denom = s * s + 2.0 * s * c + 1.0;
        return std::exp(-t * std::pow(s, 1.0 / beta)) / denom;
    };
    using boost::math::quadrature::gauss_kronrod;
    const double tol = 1e-13;
    const double upper = std::pow(60.0 / t, beta);
    const double peak = std::min(std::max(-c, 0.0), upper);
    double integral = 0.0;
    if (peak > 0.0) integral += gauss_kronrod<double, 61>::integrate(integrand, 0.0, peak, 12, tol);
    integral += gauss_kronrod<double, 61>::integrate(integrand, peak, upper, 12, tol);
    return std::sin(beta * kPi) / (beta * kPi) * integral;
}

} // namespace

double mittag_leffler(double beta, double z) {
    if (!(beta > 0.0 && beta <= 2.0)) throw std::invalid_argument("mittag_leffler: beta must lie in (0,2]");
    if (std::isnan(z)) throw std::invalid_argument("mittag_leffler: argument is NaN");
    if (z == 0.0) return 1.0;

    if (beta == 1.0) {
        const double v = std::exp(z);
        if (!std::isfinite(v)) throw std::overflow_error("mittag_leffler: result exceeds double range");
        return v;
    }
    if (beta == 2.0) {
        if (z < 0.0) return std::cos(std::sqrt(-z));
        const double v = std::cosh(std::sqrt(z));
        if (!std::isfinite(v)) throw std::overflow_error("mittag_leffler: result exceeds double range");
        return v;
    }

    if (z > 0.0) {
        // Leading growth (1/beta) exp(z^(1/beta))
        if (std::pow(z, 1.0 / beta) > 709.0) throw std::overflow_error("mittag_leffler: result exceeds double range");
        return series(beta, z);
    }

    const double x = -z;
    if (x <= 1.0 || (beta >= 1.0 && x <= 10.0)) return series(beta, z);

    if (x > 10.0) {
        double value = asymptotic_tail(beta, z);
        if (beta > 1.0) {
            const double r = std::pow(x, 1.0 / beta);
            value += (2.0 / beta) * std::exp(r * std::cos(kPi / beta)) * std::cos(r * std::sin(kPi / beta));
        }
        return value;
    }
    return laplace_representation(beta, x);
}

} // namespace fracmono::kernels
