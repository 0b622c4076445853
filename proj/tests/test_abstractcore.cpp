#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/binomial.hpp>

#include "fracmono/abstractcore/lambda.hpp"
#include "fracmono/abstractcore/yosida.hpp"
#include "fracmono/kernels/random.hpp"
#include "fracmono/stepper/solver.hpp"

using namespace fracmono;
using namespace fracmono::abstractcore;
using namespace fracmono::operators;

namespace {

// Dense -dt^-beta * GL Toeplitz matrix with weights from generalized binomials.
Eigen::MatrixXd dense_lambda(double beta, double dt, std::size_t n) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> w(n);
    double binom = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = (k % 2 == 0 ? 1.0 : -1.0) * binom;
        binom *= (beta - static_cast<double>(k)) / static_cast<double>(k + 1);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -std::pow(dt, -beta) * w[i - j];
    return L;
}

NodalSeries random_series(std::size_t n, std::size_t m, std::uint64_t seed) {
    kernels::GaussianStream g(seed);
    NodalSeries u(n, m);
    for (auto& x : u.flat()) x = g.next();
    return u;
}

TripleSpec pme_triple(std::size_t n, double p = 3.0) { return TripleSpec{Grid1D{n, 1.0}, TripleKind::PorousMedium, p, 1.0}; }
TripleSpec hilbert_triple(std::size_t n) { return TripleSpec{Grid1D{n, 1.0}, TripleKind::PLaplace, 2.0, 1.0}; }

NodalSeries study_forcing(const Grid1D& grid, std::size_t n_time, double dt) {
    NodalSeries f(n_time, grid.n_interior);
    const double T = static_cast<double>(n_time) * dt;
    for (std::size_t k = 0; k < n_time; ++k)
        for (std::size_t i = 0; i < grid.n_interior; ++i)
            f(k, i) = 10.0 * std::sin(std::numbers::pi * grid.x(i)) * (1.0 + static_cast<double>(k + 1) * dt / T);
    return f;
}

double max_abs_diff(const NodalSeries& a, const NodalSeries& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.flat().size(); ++k) d = std::max(d, std::fabs(a.flat()[k] - b.flat()[k]));
    return d;
}

} // namespace

TEST(DiscreteLambda, FirstColumnAndImpulse) {
    const auto L = build_discrete_lambda(0.5, 0.01, 40);
    const auto dense = dense_lambda(0.5, 0.01, 40);
    for (std::size_t k = 0; k < 40; ++k) EXPECT_NEAR(L.column()[k], dense(static_cast<Eigen::Index>(k), 0), 1e-12);
    NodalSeries impulse(40, 1);
    impulse(0, 0) = 1.0;
    const auto y = L.apply(impulse);
    for (std::size_t k = 0; k < 40; ++k) EXPECT_DOUBLE_EQ(y(k, 0), L.column()[k]);
    EXPECT_THROW(build_discrete_lambda(0.5, 0.01, 0), std::invalid_argument);
}

TEST(DiscreteLambda, BetaOneIsNegatedBackwardDifference) {
    const auto L = build_discrete_lambda(1.0, 0.1, 6);
    const auto u = random_series(6, 2, 4);
    const auto y = L.apply(u);
    for (std::size_t k = 0; k < 6; ++k)
        for (std::size_t i = 0; i < 2; ++i) {
            const double prev = k > 0 ? u(k - 1, i) : 0.0;
            EXPECT_NEAR(y(k, i), -(u(k, i) - prev) / 0.1, 1e-12);
        }
}

TEST(DiscreteLambda, MatchesDenseProduct) {
    const auto L = build_discrete_lambda(0.3, 0.05, 25);
    const auto u = random_series(25, 3, 8);
    const auto y = L.apply(u);
    const Eigen::MatrixXd D = dense_lambda(0.3, 0.05, 25);
    for (std::size_t i = 0; i < 3; ++i) {
        Eigen::VectorXd col(25);
        for (Eigen::Index k = 0; k < 25; ++k) col(k) = u(static_cast<std::size_t>(k), i);
        const Eigen::VectorXd expect = D * col;
        for (Eigen::Index k = 0; k < 25; ++k) EXPECT_NEAR(y(static_cast<std::size_t>(k), i), expect(k), 1e-10);
    }
}

TEST(DiscreteLambda, Dissipative) {
    for (double beta : {0.2, 0.5, 0.9, 1.0}) {
        const auto L = build_discrete_lambda(beta, 0.01, 50);
        EXPECT_LE(max_dissipativity(L.column(), 2, 1000, 11), 1e-12) << beta;
        EXPECT_LE(max_dissipativity(yosida_column(L, 10.0), 2, 200, 12), 1e-12) << beta;
    }
}

TEST(Resolvent, RoundTripAndScalarLimit) {
    const auto L = build_discrete_lambda(0.6, 0.02, 30);
    const auto v = random_series(30, 4, 5);
    const auto w = resolvent(L, 3.0, v);
    auto back = w;
    for (auto& x : back.flat()) x *= 3.0;
    const auto lw = L.apply(w);
    for (std::size_t k = 0; k < back.flat().size(); ++k) back.flat()[k] -= lw.flat()[k];
    EXPECT_LT(max_abs_diff(back, v), 1e-12);

    // With the memory removed (dt^-beta scaling to zero) the resolvent is v / alpha.
    const auto weak = build_discrete_lambda(0.6, 1e12, 30);
    const auto s = resolvent(weak, 4.0, v);
    for (std::size_t k = 0; k < v.flat().size(); ++k) EXPECT_NEAR(s.flat()[k], v.flat()[k] / 4.0, 1e-6);
    EXPECT_THROW((void)resolvent(L, 0.0, v), std::invalid_argument);
}

TEST(Resolvent, LargeAlphaLimitAndContraction) {
    const auto L = build_discrete_lambda(0.5, 0.05, 40);
    const auto v = random_series(40, 1, 6);
    std::vector<double> errs;
    for (double alpha : {1e2, 1e3, 1e4}) {
        auto w = resolvent(L, alpha, v);
        double e = 0.0;
        for (std::size_t k = 0; k < 40; ++k) e = std::max(e, std::fabs(alpha * w(k, 0) - v(k, 0)));
        errs.push_back(e);
    }
    EXPECT_NEAR(std::log10(errs[0] / errs[2]) / 2.0, 1.0, 0.05);
    for (double alpha : {0.1, 1.0, 10.0, 1e3}) {
        EXPECT_LE(resolvent_contraction(L, alpha), 1.0 + 1e-12) << alpha;
    }
}

TEST(Resolvent, YosidaColumnMatchesDenseFormula) {
    const double alpha = 7.0;
    const auto L = build_discrete_lambda(0.4, 0.1, 20);
    const Eigen::MatrixXd D = dense_lambda(0.4, 0.1, 20);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(20, 20);
    const Eigen::MatrixXd Va = (alpha * I - D).inverse();
    const Eigen::MatrixXd La = alpha * (alpha * Va - I);
    const auto col = yosida_column(L, alpha);
    for (Eigen::Index k = 0; k < 20; ++k) EXPECT_NEAR(col[static_cast<std::size_t>(k)], La(k, 0), 1e-11);
    // Resolvent identity alpha V_alpha - I = V_alpha Lambda.
    EXPECT_LT(((alpha * Va - I) - Va * D).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Symbol, Examples) {
    const std::vector<double> zero{0.0};
    EXPECT_EQ(symbol_error(0.5, 0.01, zero), 0.0);
    EXPECT_EQ(std::abs(discrete_symbol(0.5, 0.01, 0.0)), 0.0);
    for (double omega : {0.5, 2.0, -3.0}) {
        const double dt = 0.01;
        const std::vector<double> om{omega};
        const std::complex<double> euler = (1.0 - std::exp(std::complex<double>(0.0, -omega * dt))) / dt;
        const double expect = std::abs(euler - std::complex<double>(0.0, omega)) / std::fabs(omega);
        EXPECT_NEAR(symbol_error(1.0, dt, om), expect, 1e-12);
        EXPECT_NEAR(expect / (std::fabs(omega) * dt), 0.5, 0.01);
    }
    const std::vector<double> beyond{400.0};
    EXPECT_THROW((void)symbol_error(0.5, 0.01, beyond), std::invalid_argument);
    EXPECT_THROW((void)symbol_error(1.5, 0.01, zero), std::invalid_argument);
}

TEST(Symbol, LinearInDt) {
    const std::vector<double> omegas{0.5, 1.0, 2.0, 4.0};
    for (double beta : {0.5, 0.8}) {
        const double e1 = symbol_error(beta, 1e-1, omegas);
        const double e2 = symbol_error(beta, 1e-2, omegas);
        const double e3 = symbol_error(beta, 1e-3, omegas);
        EXPECT_GT(e1, e2);
        EXPECT_GT(e2, e3);
        EXPECT_NEAR(std::log10(e1 / e2), 1.0, 0.1);
        EXPECT_NEAR(std::log10(e2 / e3), 1.0, 0.05);
    }
    // Leading term beta * omega dt / 2 for a single frequency.
    const std::vector<double> one{1.0};
    EXPECT_NEAR(symbol_error(0.5, 1e-3, one), 0.25e-3, 1e-6);
}

TEST(Regularized, IdentityZeroForcing) {
    const auto op = make_operator(OperatorSpec{LinearSpec{1.0}}, hilbert_triple(5));
    const auto L = build_discrete_lambda(0.5, 0.1, 10);
    const auto s = solve_regularized(*op, L, 10.0, NodalSeries(10, 5));
    for (double x : s.u_alpha.flat()) EXPECT_EQ(x, 0.0);
}

TEST(Regularized, IdentityMatchesTriangularSolve) {
    const double alpha = 25.0;
    const auto op = make_operator(OperatorSpec{LinearSpec{1.0}}, hilbert_triple(4));
    const auto L = build_discrete_lambda(0.7, 0.05, 30);
    const auto f = random_series(30, 4, 21);
    const auto s = solve_regularized(*op, L, alpha, f);
    const Eigen::MatrixXd D = dense_lambda(0.7, 0.05, 30);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(30, 30);
    const Eigen::MatrixXd La = alpha * (alpha * (alpha * I - D).inverse() - I);
    const Eigen::MatrixXd M = I - La;
    for (std::size_t i = 0; i < 4; ++i) {
        Eigen::VectorXd rhs(30);
        for (Eigen::Index k = 0; k < 30; ++k) rhs(k) = f(static_cast<std::size_t>(k), i);
        const Eigen::VectorXd u = M.triangularView<Eigen::Lower>().solve(rhs);
        for (Eigen::Index k = 0; k < 30; ++k) EXPECT_NEAR(s.u_alpha(static_cast<std::size_t>(k), i), u(k), 1e-10);
    }
}

TEST(Regularized, PorousMediumResidual) {
    const auto triple = pme_triple(16);
    const auto op = make_operator(OperatorSpec{PorousMediumSpec{}}, triple);
    const auto L = build_discrete_lambda(0.5, 1.0 / 32, 32);
    const auto f = study_forcing(triple.grid, 32, 1.0 / 32);
    stepper::SolverConfig cfg;
    cfg.nonlinear_tol = 1e-12;
    for (double alpha : {1.0, 100.0, 1e4}) {
        const auto s = solve_regularized(*op, L, alpha, f, cfg);
        EXPECT_LE(s.residual, 1e-8) << alpha;
    }
}

TEST(Reference, AgreesWithGrunwaldMarching) {
    const auto triple = pme_triple(16);
    const auto op = make_operator(OperatorSpec{PorousMediumSpec{}}, triple);
    const double dt = 1.0 / 32;
    const auto L = build_discrete_lambda(0.5, dt, 32);
    const auto f = study_forcing(triple.grid, 32, dt);
    stepper::SolverConfig cfg;
    cfg.nonlinear_tol = 1e-13;
    const auto ref = solve_reference(*op, L, f, cfg);

    cfg.scheme = kernels::MemoryScheme::GrunwaldLetnikov;
    cfg.dt = dt;
    const std::vector<double> x0(16, 0.0);
    const stepper::Forcing forcing = [&](double t, std::span<double> out) {
        const auto k = static_cast<std::size_t>(std::llround(t / dt));
        if (k == 0) return std::fill(out.begin(), out.end(), 0.0);
        const auto row = f.row(k - 1);
        std::copy(row.begin(), row.end(), out.begin());
    };
    const auto rec = stepper::march(*op, 0.5, 1.0, x0, forcing, cfg);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < 32; ++k)
        for (std::size_t i = 0; i < 16; ++i) {
            worst = std::max(worst, std::fabs(rec.states(k + 1, i) - ref.u(k, i)));
            scale = std::max(scale, std::fabs(ref.u(k, i)));
        }
    EXPECT_LT(worst, 1e-9 * scale);
}

TEST(YosidaStudy, PorousMediumConvergence) {
    const auto triple = pme_triple(16);
    const auto op = make_operator(OperatorSpec{PorousMediumSpec{}}, triple);
    const double dt = 1.0 / 32;
    const auto L = build_discrete_lambda(0.5, dt, 32);
    const auto f = study_forcing(triple.grid, 32, dt);
    const std::vector<double> alphas{1.0, 10.0, 100.0, 1e3, 1e4};
    stepper::SolverConfig cfg;
    cfg.nonlinear_tol = 1e-12;
    const auto study = yosida_convergence_study(*op, L, f, alphas, cfg, 2);
    EXPECT_TRUE(study.bounded);
    EXPECT_TRUE(std::isfinite(study.apriori_bound_u));
    EXPECT_EQ(study.decreasing_from, 0U);
    EXPECT_LE(study.errors.back(), 1e-3 * study.norm_reference);
    EXPECT_LE(study.resolvent_constant, 1.0 + 1e-10);

    std::ostringstream csv;
    write_study_csv(csv, study);
    EXPECT_EQ(csv.str().rfind("alpha,residual,norm_u,norm_Au,err_vs_reference\n", 0), 0U);

    const auto serial = yosida_convergence_study(*op, L, f, alphas, cfg, 1);
    EXPECT_EQ(serial.errors, study.errors);
}

TEST(YosidaStudy, LinearRateIsOneOverAlpha) {
    const auto op = make_operator(OperatorSpec{LinearSpec{1.0}}, hilbert_triple(16));
    const double dt = 1.0 / 32;
    const auto L = build_discrete_lambda(0.5, dt, 32);
    const auto f = study_forcing(Grid1D{16, 1.0}, 32, dt);
    const std::vector<double> alphas{1.0, 10.0, 100.0, 1e3, 1e4};
    const auto study = yosida_convergence_study(*op, L, f, alphas);
    EXPECT_TRUE(study.bounded);
    EXPECT_NEAR(std::log10(study.errors[3] / study.errors[4]), 1.0, 0.02);
    EXPECT_LT(study.rate, -0.9);
}

TEST(YosidaStudy, ZeroForcingGivesZero) {
    const auto op = make_operator(OperatorSpec{PorousMediumSpec{}}, pme_triple(8));
    const auto L = build_discrete_lambda(0.5, 0.1, 10);
    const std::vector<double> alphas{1.0, 10.0, 100.0};
    const auto study = yosida_convergence_study(*op, L, NodalSeries(10, 8), alphas);
    for (const auto& s : study.states)
        for (double x : s.u_alpha.flat()) EXPECT_EQ(x, 0.0);
    const std::vector<double> two{1.0, 10.0};
    EXPECT_THROW((void)yosida_convergence_study(*op, L, NodalSeries(10, 8), two), std::invalid_argument);
    const std::vector<double> unsorted{1.0, 100.0, 10.0};
    EXPECT_THROW((void)yosida_convergence_study(*op, L, NodalSeries(10, 8), unsorted), std::invalid_argument);
}
