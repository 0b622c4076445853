#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fracmono/stepper/solver.hpp"
#include "fracmono/stochastic/noise.hpp"
#include "fracmono/stochastic/spde.hpp"

using namespace fracmono;
using namespace fracmono::stochastic;
using namespace fracmono::operators;

namespace {

NoiseSpec scalar_noise(double gamma, double b, NoiseRegularity reg = NoiseRegularity::BoundedInTime) {
    NoiseSpec n;
    n.gamma = gamma;
    n.B = {Eigen::MatrixXd::Constant(1, 1, b)};
    n.regularity = reg;
    return n;
}

// b^2 / Gamma(1+e)^2 int_0^t (t-s)^(2e) ds by tanh-sinh quadrature, in the variable r = t - s.
double variance_oracle(double beta, double gamma, double b, double t) {
    const double e = beta - gamma;
    boost::math::quadrature::tanh_sinh<double> q;
    const double integral = q.integrate([&](double r) { return std::pow(r, 2.0 * e); }, 0.0, t);
    const double g = boost::math::tgamma(1.0 + e);
    return b * b * integral / (g * g);
}

stepper::ProblemSpec scalar_linear(double beta, double T, double lambda) {
    stepper::ProblemSpec p;
    p.beta = beta;
    p.T = T;
    p.x0 = {0.0};
    p.op = OperatorSpec{LinearSpec{lambda}};
    p.triple = TripleSpec{Grid1D{1, 1.0}, TripleKind::PLaplace, 2.0, 1.0};
    return p;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments final_moments(const NoiseSpec& noise, double beta, std::size_t n_steps, std::size_t paths,
                      std::uint64_t seed0, std::size_t component = 0) {
    std::vector<double> x(paths);
    for (std::size_t i = 0; i < paths; ++i)
        x[i] = fractional_convolution_path(noise, beta, 1.0 / static_cast<double>(n_steps), n_steps, seed0 + i)(n_steps,
                                                                                                        component);
    Moments m;
    for (double v : x) m.mean += v;
    m.mean /= static_cast<double>(paths);
    for (double v : x) m.var += (v - m.mean) * (v - m.mean);
    m.var /= static_cast<double>(paths - 1);
    return m;
}

} // namespace

TEST(Noise, GateExamples) {
    EXPECT_TRUE(validate_noise(0.5, scalar_noise(0.9, 1.0)).ok);
    const auto rejected = validate_noise(0.3, scalar_noise(0.9, 1.0));
    EXPECT_FALSE(rejected.ok);
    EXPECT_NE(rejected.reason.find("gamma < beta + 1/2"), std::string::npos);
    EXPECT_TRUE(validate_noise(0.5, scalar_noise(0.5, 1.0, NoiseRegularity::SquareIntegrableInTime)).ok);
    EXPECT_FALSE(validate_noise(0.5, scalar_noise(0.6, 1.0, NoiseRegularity::SquareIntegrableInTime)).ok);
    EXPECT_FALSE(validate_noise(0.5, scalar_noise(0.0, 1.0)).ok);
    EXPECT_FALSE(validate_noise(0.9, scalar_noise(1.2, 1.0)).ok);
}

TEST(Noise, GateSoundness) {
    for (int bi = 1; bi <= 10; ++bi) {
        for (int gi = 1; gi <= 20; ++gi) {
            const double beta = 0.1 * bi;
            const double gamma = 0.05 * gi;
            for (auto reg : {NoiseRegularity::BoundedInTime, NoiseRegularity::SquareIntegrableInTime}) {
                const bool ok = validate_noise(beta, scalar_noise(gamma, 1.0, reg)).ok;
                const double exponent = 2.0 * (beta - gamma);
                if (ok) {
                    EXPECT_GT(exponent, -1.0);
                    EXPECT_TRUE(std::isfinite(convolution_variance(beta, gamma, 1.0, 1.0)));
                } else if (gamma >= beta + 0.5) {
                    EXPECT_LE(exponent, -1.0 + 1e-12);
                }
            }
        }
    }
}

TEST(Noise, AnalyticVarianceMatchesQuadratureOracle) {
    for (auto [beta, gamma] : std::vector<std::pair<double, double>>{{0.5, 0.25}, {0.5, 0.5}, {0.8, 1.0}, {0.3, 0.7}}) {
        const double a = convolution_variance(beta, gamma, 1.3, 1.0);
        const double b = variance_oracle(beta, gamma, 1.3, 1.0);
        EXPECT_NEAR(a, b, 1e-9 * b);
    }
    const double g = boost::math::tgamma(1.25);
    EXPECT_NEAR(convolution_variance(0.5, 0.25, 1.0, 1.0), 1.0 / (1.5 * g * g), 1e-12);
}

TEST(Noise, VarianceLaw) {
    const std::size_t paths = 10000;
    for (auto [beta, gamma] : std::vector<std::pair<double, double>>{{0.5, 0.25}, {0.5, 0.5}, {0.8, 1.0}}) {
        const auto m = final_moments(scalar_noise(gamma, 1.0), beta, 256, paths, 1000);
        const double exact = variance_oracle(beta, gamma, 1.0, 1.0);
        EXPECT_LT(std::fabs(m.var - exact) / exact, 4.0 / std::sqrt(static_cast<double>(paths)))
            << beta << ' ' << gamma;
    }
}

TEST(Noise, WienerCaseAndCentering) {
    // gamma = beta: F is the plain Wiener integral, Var = b^2 t.
    NoiseSpec noise;
    noise.gamma = 0.7;
    noise.B = {Eigen::MatrixXd(3, 2)};
    noise.B.front() << 1.0, 0.0, 0.5, 0.5, 0.0, 2.0;
    const std::size_t paths = 10000;
    for (std::size_t c = 0; c < 3; ++c) {
        const auto m = final_moments(noise, 0.7, 64, paths, 77, c);
        const double exact = noise.B.front().row(static_cast<Eigen::Index>(c)).squaredNorm();
        EXPECT_LT(std::fabs(m.mean), 4.0 * std::sqrt(exact / paths));
        EXPECT_LT(std::fabs(m.var - exact) / exact, 4.0 / std::sqrt(static_cast<double>(paths)));
    }
}

TEST(Noise, ZeroBIsZeroAndPathsAreAdapted) {
    const auto zero = fractional_convolution_path(scalar_noise(0.4, 0.0), 0.5, 0.01, 100, 3);
    for (double x : zero.flat()) EXPECT_EQ(x, 0.0);

    const auto noise = scalar_noise(0.9, 1.0);
    auto dw = wiener_increments(1, 0.01, 100, 5);
    const auto a = fractional_convolution_path(noise, 0.5, 0.01, dw);
    dw(40, 0) += 1.0;
    const auto b = fractional_convolution_path(noise, 0.5, 0.01, dw);
    for (std::size_t n = 0; n <= 40; ++n) EXPECT_EQ(a(n, 0), b(n, 0));
    for (std::size_t n = 41; n <= 100; ++n) EXPECT_NE(a(n, 0), b(n, 0));
    EXPECT_EQ(a, fractional_convolution_path(noise, 0.5, 0.01, 100, 5));
    EXPECT_THROW((void)fractional_convolution_path(scalar_noise(0.9, 1.0), 0.3, 0.01, 10, 1), std::invalid_argument);
}

TEST(Spde, ZeroNoiseIsDeterministicSolve) {
    stepper::ProblemSpec p;
    p.beta = 0.6;
    p.T = 0.5;
    p.triple = TripleSpec{Grid1D{12, 1.0}, TripleKind::PorousMedium, 3.0, 1.0};
    p.op = OperatorSpec{PorousMediumSpec{}};
    p.x0.resize(12);
    for (std::size_t i = 0; i < 12; ++i) p.x0[i] = std::sin(3.14159 * p.triple.grid.x(i));
    NoiseSpec noise;
    noise.gamma = 0.5;
    noise.B = {Eigen::MatrixXd::Zero(12, 4)};
    stepper::SolverConfig cfg;
    cfg.dt = 0.01;
    const auto det = stepper::solve_deterministic(p, cfg);
    const auto sto = solve_spde(p, noise, cfg, 42);
    EXPECT_EQ(det.states, sto.states);
}

TEST(Spde, OrnsteinUhlenbeckOracle) {
    const double lambda = 2.0;
    const double b = 0.7;
    const double dt = 0.01;
    auto p = scalar_linear(1.0, 1.0, lambda);
    p.x0 = {0.3};
    stepper::SolverConfig cfg;
    cfg.dt = dt;
    const auto rec = solve_spde(p, scalar_noise(1.0, b), cfg, 9);
    const auto dw = wiener_increments(1, dt, 100, 9);
    double x = 0.3;
    double worst = 0.0;
    for (std::size_t n = 1; n <= 100; ++n) {
        x = (x + b * dw(n - 1, 0)) / (1.0 + lambda * dt);
        worst = std::max(worst, std::fabs(rec.states(n, 0) - x));
    }
    EXPECT_LT(worst, 1e-10);
    EXPECT_EQ(rec.states, solve_spde(p, scalar_noise(1.0, b), cfg, 9).states);
    EXPECT_NE(rec.states, solve_spde(p, scalar_noise(1.0, b), cfg, 10).states);
}

TEST(Spde, PorousMediumPathRuns) {
    stepper::ProblemSpec p;
    p.beta = 0.7;
    p.T = 0.25;
    p.triple = TripleSpec{Grid1D{16, 1.0}, TripleKind::PorousMedium, 3.0, 1.0};
    p.op = OperatorSpec{PorousMediumSpec{}};
    p.x0.assign(16, 0.5);
    NoiseSpec noise;
    noise.gamma = 0.9;
    noise.B = {Eigen::MatrixXd::Identity(16, 16) * 0.3};
    stepper::SolverConfig cfg;
    cfg.dt = 1.0 / 64;
    const auto rec = solve_spde(p, noise, cfg, 3);
    for (const auto& d : rec.diagnostics) EXPECT_TRUE(std::isfinite(d.norm_H));
}

TEST(MonteCarlo, ZeroOperatorMoments) {
    const auto p = scalar_linear(0.5, 1.0, 0.0);
    const auto noise = scalar_noise(0.25, 1.0);
    stepper::SolverConfig cfg;
    cfg.dt = 1.0 / 64;
    const auto stats = monte_carlo_moments(p, noise, cfg, 4000, 100);
    EXPECT_EQ(stats.n_ok, 4000U);
    EXPECT_EQ(stats.n_fail, 0U);
    const std::size_t last = stats.times.size() - 1;
    EXPECT_LT(std::fabs(stats.mean_functional[last]), 3.0 * stats.stderr_functional[last]);
    const double exact = variance_oracle(0.5, 0.25, 1.0, 1.0);
    EXPECT_LT(std::fabs(stats.var_functional[last] - exact), 4.0 * exact * std::sqrt(2.0 / 4000.0));

    const auto half = monte_carlo_moments(p, noise, cfg, 2000, 100);
    const double ratio = stats.stderr_functional[last] / half.stderr_functional[last];
    EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.05);
    EXPECT_THROW((void)monte_carlo_moments(p, noise, cfg, 1, 100), std::invalid_argument);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeStatistics) {
    stepper::ProblemSpec p;
    p.beta = 0.5;
    p.T = 0.25;
    p.triple = TripleSpec{Grid1D{8, 1.0}, TripleKind::PLaplace, 3.0, 1.0};
    p.op = OperatorSpec{PLaplaceSpec{}};
    p.x0.assign(8, 0.2);
    NoiseSpec noise;
    noise.gamma = 0.6;
    noise.B = {Eigen::MatrixXd::Identity(8, 8) * 0.5};
    stepper::SolverConfig cfg;
    cfg.dt = 1.0 / 32;
    MonteCarloOptions one;
    MonteCarloOptions four;
    four.threads = 4;
    const auto a = monte_carlo_moments(p, noise, cfg, 200, 7, one);
    const auto b = monte_carlo_moments(p, noise, cfg, 200, 7, four);
    EXPECT_EQ(a.mean_state, b.mean_state);
    EXPECT_EQ(a.var_functional, b.var_functional);
    EXPECT_EQ(a.mean_normH, b.mean_normH);

    std::ostringstream csv;
    write_statistics_csv(csv, a);
    EXPECT_EQ(csv.str().rfind("# seed=7", 0), 0U);
    EXPECT_NE(csv.str().find("t,mean_normH,var_functional,stderr,n_ok,n_fail\n"), std::string::npos);
}
