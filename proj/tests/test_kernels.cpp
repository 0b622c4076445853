#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fracmono/kernels/gamma.hpp"
#include "fracmono/kernels/mittag_leffler.hpp"
#include "fracmono/kernels/random.hpp"
#include "fracmono/kernels/subordinator.hpp"
#include "fracmono/kernels/weights.hpp"

using namespace fracmono;
using namespace fracmono::kernels;

namespace {

using Big = boost::multiprecision::cpp_dec_float_100;

// (-1)^k binom(beta, k) = Gamma(k - beta) / (Gamma(-beta) Gamma(k + 1)), in 100 digits.
double binomial_weight_oracle(double beta, int k) {
    const Big b(beta);
    const Big value = boost::math::tgamma(Big(k) - b) / (boost::math::tgamma(-b) * boost::math::tgamma(Big(k + 1)));
    return static_cast<double>(value);
}

// Brute-force truncated series with high-precision Gamma.
double mittag_leffler_series_oracle(double beta, double z, int terms) {
    Big sum = 0;
    const Big bz(z);
    Big power = 1;
    for (int k = 0; k < terms; ++k) {
        sum += power / boost::math::tgamma(Big(beta) * k + 1);
        power *= bz;
    }
    return static_cast<double>(sum);
}

// E_{1/2}(-x) = exp(x^2) erfc(x)
double mittag_leffler_half_oracle(double x) {
    const Big bx(x);
    return static_cast<double>(boost::multiprecision::exp(bx * bx) * boost::math::erfc(bx));
}

NodalSeries scalar_series(const std::vector<double>& values) {
    NodalSeries s(values.size(), 1);
    for (std::size_t k = 0; k < values.size(); ++k) s(k, 0) = values[k];
    return s;
}

} // namespace

TEST(Gamma, MatchesStdTgammaOnUnitToFifty) {
    double worst = 0.0;
    for (double x = 0.01; x < 50.0; x += 0.0737) {
        const double rel = std::fabs(kernels::gamma(x) / std::tgamma(x) - 1.0);
        worst = std::max(worst, rel);
    }
    EXPECT_LT(worst, 1e-12);
    EXPECT_NEAR(kernels::gamma(1.5), std::sqrt(std::numbers::pi) / 2.0, 1e-15);
}

TEST(GrunwaldWeights, BetaOneIsFirstDifference) {
    EXPECT_EQ(grunwald_weights(1.0, 3), (std::vector<double>{1.0, -1.0, 0.0, 0.0}));
}

TEST(GrunwaldWeights, HalfOrderMatchesBinomialOracle) {
    const auto w = grunwald_weights(0.5, 3);
    for (int k = 0; k <= 3; ++k) EXPECT_NEAR(w[k], binomial_weight_oracle(0.5, k), 1e-15);
    EXPECT_DOUBLE_EQ(w[1], -0.5);
    EXPECT_DOUBLE_EQ(w[2], -0.125);
    EXPECT_DOUBLE_EQ(w[3], -0.0625);
}

TEST(GrunwaldWeights, RecurrenceMatchesClosedFormToE13) {
    for (double beta = 0.1; beta < 0.95; beta += 0.1) {
        const auto w = grunwald_weights(beta, 1000);
        for (int k : {1, 2, 5, 17, 100, 333, 999, 1000}) {
            const double oracle = binomial_weight_oracle(beta, k);
            EXPECT_LT(std::fabs(w[k] / oracle - 1.0), 1e-13) << "beta=" << beta << " k=" << k;
        }
    }
}

TEST(GrunwaldWeights, SignAndPartialSumInvariants) {
    const auto w = grunwald_weights(0.5, 10000);
    EXPECT_EQ(w[0], 1.0);
    double partial = 0.0;
    double previous = 2.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k > 0) {
            EXPECT_LT(w[k], 0.0);
        }
        partial += w[k];
        EXPECT_GT(partial, 0.0);
        EXPECT_LE(partial, previous);
        previous = partial;
    }
    EXPECT_LT(partial, 1.0);
    // partial sum is (-1)^n binom(beta - 1, n) ~ n^-beta / Gamma(1 - beta)
    EXPECT_NEAR(partial, std::pow(10000.0, -0.5) / std::tgamma(0.5), 1e-5);
}

TEST(GrunwaldWeights, RejectsBetaOutsideRange) {
    EXPECT_THROW(grunwald_weights(0.0, 3), std::invalid_argument);
    EXPECT_THROW(grunwald_weights(1.2, 3), std::invalid_argument);
}

TEST(L1Coefficients, Examples) {
    const auto b = l1_coefficients(0.5, 2);
    ASSERT_EQ(b.size(), 3u);
    EXPECT_EQ(b[0], 1.0);
    EXPECT_NEAR(b[1], std::sqrt(2.0) - 1.0, 1e-15);
    EXPECT_NEAR(b[2], std::sqrt(3.0) - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(b[1], 0.414214, 5e-7);
    EXPECT_NEAR(b[2], 0.317837, 5e-7);
    EXPECT_EQ(l1_coefficients(0.3, 0), std::vector<double>{1.0});
}

TEST(L1Coefficients, StrictlyDecreasingPositive) {
    const auto b = l1_coefficients(0.5, 100);
    for (std::size_t j = 1; j < b.size(); ++j) {
        EXPECT_GT(b[j], 0.0);
        EXPECT_LT(b[j], b[j - 1]);
        EXPECT_NEAR(b[j], std::sqrt(j + 1.0) - std::sqrt(static_cast<double>(j)), 1e-14);
    }
}

TEST(L1Coefficients, RejectsBetaOne) {
    EXPECT_THROW(l1_coefficients(1.0, 4), std::invalid_argument);
    EXPECT_THROW(l1_coefficients(0.0, 4), std::invalid_argument);
}

TEST(FractionalIntegral, ConstantInput) {
    const std::size_t n = 64;
    const double dt = 1.0 / n;
    const auto ones = scalar_series(std::vector<double>(n + 1, 1.0));
    EXPECT_NEAR(fractional_integral(ones, 1.0, dt)(n, 0), 1.0, 1e-13);
    EXPECT_NEAR(fractional_integral(ones, 0.5, dt)(n, 0), 1.0 / std::tgamma(1.5), 1e-13);
    EXPECT_NEAR(1.0 / std::tgamma(1.5), 1.128379, 1e-6);
    const auto zeros = scalar_series(std::vector<double>(n + 1, 0.0));
    const auto out = fractional_integral(zeros, 0.5, dt);
    for (std::size_t k = 0; k <= n; ++k) EXPECT_EQ(out(k, 0), 0.0);
    EXPECT_EQ(fractional_integral(ones, 0.5, dt)(0, 0), 0.0);
    EXPECT_THROW(fractional_integral(ones, 0.5, 0.0), std::invalid_argument);
}

TEST(CaputoDerivative, LinearFunction) {
    const std::size_t n = 256;
    const double dt = 1.0 / n;
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = k * dt;
    const auto u = scalar_series(t);
    const std::vector<double> x0{0.0};
    const double exact = 1.0 / std::tgamma(1.5);
    // L1 interpolates piecewise linearly, so it is exact on u(t) = t.
    EXPECT_NEAR(caputo_derivative(u, x0, 0.5, dt, MemoryScheme::L1)(n, 0), exact, 1e-12);
    EXPECT_NEAR(caputo_derivative(u, x0, 0.5, dt, MemoryScheme::GrunwaldLetnikov)(n, 0), exact, 5e-3);
}

TEST(CaputoDerivative, ConstantStateGivesZero) {
    NodalSeries u(20, 3);
    const std::vector<double> x0{1.5, -2.0, 0.25};
    for (std::size_t k = 0; k < 20; ++k)
        for (std::size_t i = 0; i < 3; ++i) u(k, i) = x0[i];
    for (auto scheme : {MemoryScheme::L1, MemoryScheme::GrunwaldLetnikov}) {
        const auto d = caputo_derivative(u, x0, 0.4, 0.1, scheme);
        for (double v : d.flat()) EXPECT_EQ(v, 0.0);
    }
}

TEST(CaputoDerivative, RejectsBadInput) {
    NodalSeries u(4, 2);
    const std::vector<double> x0{0.0};
    EXPECT_THROW(caputo_derivative(u, x0, 0.5, 0.1), std::invalid_argument);
    const std::vector<double> x2{0.0, 0.0};
    EXPECT_THROW(caputo_derivative(u, x2, 0.5, -0.1), std::invalid_argument);
}

TEST(CaputoDerivative, LeftInverseOfFractionalIntegral) {
    auto error_at = [](std::size_t n, MemoryScheme scheme) {
        const double dt = 1.0 / n;
        std::vector<double> f(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = k * dt;
            f[k] = std::sin(3.0 * t) + t * t;
        }
        const auto integral = fractional_integral(scalar_series(f), 0.6, dt);
        const std::vector<double> x0{0.0};
        const auto back = caputo_derivative(integral, x0, 0.6, dt, scheme);
        double worst = 0.0;
        for (std::size_t k = n / 2; k <= n; ++k) worst = std::max(worst, std::fabs(back(k, 0) - f[k]));
        return worst;
    };
    for (auto scheme : {MemoryScheme::L1, MemoryScheme::GrunwaldLetnikov}) {
        const double coarse = error_at(64, scheme);
        const double mid = error_at(256, scheme);
        const double fine = error_at(1024, scheme);
        EXPECT_LT(mid, coarse);
        EXPECT_LT(fine, mid);
        EXPECT_LT(fine, 2e-2);
    }
}

TEST(KernelAlgebra, HalfPlusHalfIsOne) {
    // Analytic: g_{1/2} * g_{1/2} = g_1 = 1; discretely within O(dt^{1/2}) at fixed t > 0.
    double previous = 1e300;
    for (std::size_t n : {64u, 256u, 1024u}) {
        const double dt = 1.0 / n;
        NodalSeries g(n + 1, 1);
        for (std::size_t k = 1; k <= n; ++k) g(k, 0) = riemann_liouville_kernel(0.5, k * dt);
        const auto conv = fractional_integral(g, 0.5, dt);
        double worst = 0.0;
        for (std::size_t k = n / 4; k <= n; ++k) worst = std::max(worst, std::fabs(conv(k, 0) - 1.0));
        EXPECT_LT(worst, 2.0 * std::sqrt(dt));
        EXPECT_LT(worst, previous);
        previous = worst;
    }
}

TEST(KernelAlgebra, DiscreteInequalityForSquares) {
    // u_n (D u)_n >= 1/2 (D u^2)_n for u_0 = 0 with L1 weights.
    CounterRng rng(2024);
    const std::vector<double> x0{0.0};
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.next_u64() % 40;
        const double beta = 0.05 + 0.9 * rng.uniform_open();
        NodalSeries u(n, 1);
        NodalSeries u2(n, 1);
        for (std::size_t k = 1; k < n; ++k) {
            u(k, 0) = 4.0 * rng.uniform_open() - 2.0;
            u2(k, 0) = u(k, 0) * u(k, 0);
        }
        const auto du = caputo_derivative(u, x0, beta, 0.1, MemoryScheme::L1);
        const auto du2 = caputo_derivative(u2, x0, beta, 0.1, MemoryScheme::L1);
        for (std::size_t k = 0; k < n; ++k) {
            const double gap = u(k, 0) * du(k, 0) - 0.5 * du2(k, 0);
            EXPECT_GE(gap, -1e-12 * (1.0 + std::fabs(du2(k, 0)))) << "trial " << trial << " node " << k;
        }
    }
}

TEST(MittagLeffler, ClosedForms) {
    EXPECT_NEAR(mittag_leffler(1.0, -1.0), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(mittag_leffler(1.0, -1.0), 0.3678794, 1e-7);
    EXPECT_NEAR(mittag_leffler(2.0, -std::pow(std::numbers::pi / 2.0, 2)), 0.0, 1e-15);
    EXPECT_EQ(mittag_leffler(0.3, 0.0), 1.0);
}

TEST(MittagLeffler, HalfOrderAgainstSeriesAndErfcOracles) {
    const double series_oracle = mittag_leffler_series_oracle(0.5, -1.0, 200);
    const double erfc_oracle = mittag_leffler_half_oracle(1.0);
    EXPECT_NEAR(series_oracle, erfc_oracle, 1e-15);
    EXPECT_LT(std::fabs(mittag_leffler(0.5, -1.0) / series_oracle - 1.0), 1e-10);
    // Laplace-representation branch
    for (double x : {1.5, 3.0, 7.0, 10.0})
        EXPECT_LT(std::fabs(mittag_leffler(0.5, -x) / mittag_leffler_half_oracle(x) - 1.0), 1e-10) << x;
    // asymptotic branch
    for (double x : {10.5, 20.0, 100.0, 1e4})
        EXPECT_LT(std::fabs(mittag_leffler(0.5, -x) / mittag_leffler_half_oracle(x) - 1.0), 1e-6) << x;
}

TEST(MittagLeffler, OtherOrdersAgainstHighPrecisionSeries) {
    struct Case {
        double beta;
        double z;
        int terms;
    };
    for (const auto& c : {Case{0.3, -1.0, 300}, Case{0.8, -1.0, 120}, Case{0.8, -4.0, 400}, Case{0.3, -2.5, 600},
                          Case{0.9, -9.0, 400}, Case{1.5, -6.0, 200}, Case{0.7, 2.0, 200}, Case{1.3, 8.0, 200}}) {
        const double oracle = mittag_leffler_series_oracle(c.beta, c.z, c.terms);
        EXPECT_LT(std::fabs(mittag_leffler(c.beta, c.z) / oracle - 1.0), 1e-10) << c.beta << " " << c.z;
    }
}

TEST(MittagLeffler, CompletelyMonotoneOnNegativeAxis) {
    for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        double previous = 1.0;
        for (double x = 0.0; x <= 60.0; x += 0.25) {
            const double v = mittag_leffler(beta, -x);
            EXPECT_GT(v, 0.0) << beta << " " << x;
            EXPECT_LE(v, 1.0);
            EXPECT_LE(v, previous * (1.0 + 1e-9)) << beta << " " << x;
            previous = v;
        }
    }
}

TEST(MittagLeffler, Errors) {
    EXPECT_THROW(mittag_leffler(0.0, -1.0), std::invalid_argument);
    EXPECT_THROW(mittag_leffler(2.5, -1.0), std::invalid_argument);
    EXPECT_THROW(mittag_leffler(0.5, 1e4), std::overflow_error);
}

TEST(Subordinator, LaplaceTransformUnitTime) {
    const auto sample = sample_stable_subordinator(0.5, 1.0, 100000, 7);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double s : sample.values) {
        ASSERT_GT(s, 0.0);
        const double v = std::exp(-s);
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(sample.values.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1.0));
    EXPECT_LT(std::fabs(mean - std::exp(-1.0)), 3.0 * se);
}

TEST(Subordinator, LaplaceTransformScaledTime) {
    const double beta = 0.7;
    const double t = 2.0;
    const double lambda = 0.5;
    const auto sample = sample_stable_subordinator(beta, t, 100000, 11);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double s : sample.values) {
        const double v = std::exp(-lambda * s);
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(sample.values.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1.0));
    EXPECT_LT(std::fabs(mean - std::exp(-t * std::pow(lambda, beta))), 3.0 * se);
}

TEST(Subordinator, DeterministicAndValidated) {
    const auto a = sample_stable_subordinator(0.3, 1.0, 500, 99);
    const auto b = sample_stable_subordinator(0.3, 1.0, 500, 99);
    EXPECT_EQ(a.values, b.values);
    const auto c = sample_stable_subordinator(0.3, 1.0, 500, 100);
    EXPECT_NE(a.values, c.values);
    EXPECT_THROW(sample_stable_subordinator(1.0, 1.0, 10, 1), std::invalid_argument);
    EXPECT_THROW(sample_stable_subordinator(0.5, 0.0, 10, 1), std::invalid_argument);
}

TEST(Random, GaussianMoments) {
    GaussianStream g(5);
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.next();
        sum += x;
        sum_sq += x * x;
    }
    EXPECT_LT(std::fabs(sum / n), 4.0 / std::sqrt(n));
    EXPECT_LT(std::fabs(sum_sq / n - 1.0), 4.0 * std::sqrt(2.0 / n));
}
