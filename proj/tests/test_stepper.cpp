#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fracmono/errors.hpp"
#include "fracmono/kernels/random.hpp"
#include "fracmono/stepper/analysis.hpp"
#include "fracmono/stepper/export.hpp"
#include "fracmono/stepper/resolvent.hpp"
#include "fracmono/stepper/solver.hpp"

using namespace fracmono;
using namespace fracmono::operators;
using namespace fracmono::stepper;

namespace {

using Big = boost::multiprecision::cpp_dec_float_100;

double mittag_leffler_oracle(double beta, double z) {
    Big sum = 0;
    Big power = 1;
    for (int k = 0; k < 300; ++k) {
        sum += power / boost::math::tgamma(Big(beta) * k + 1);
        power *= Big(z);
    }
    return static_cast<double>(sum);
}

ProblemSpec scalar_linear(double beta, double T, double lambda = 1.0, double x0 = 1.0) {
    ProblemSpec p;
    p.beta = beta;
    p.T = T;
    p.x0 = {x0};
    p.op = OperatorSpec{LinearSpec{lambda}};
    p.triple = TripleSpec{Grid1D{1, 1.0}, TripleKind::PLaplace, 2.0, 1.0};
    return p;
}

std::vector<double> random_state(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    kernels::CounterRng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (2.0 * rng.uniform_open() - 1.0);
    return v;
}

std::vector<double> bump(const Grid1D& grid, double amplitude) {
    std::vector<double> v(grid.n_interior);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid.x(i) / grid.length;
        v[i] = amplitude * std::sin(std::numbers::pi * x) * (1.0 + 0.5 * std::cos(3.0 * std::numbers::pi * x));
    }
    return v;
}

ProblemSpec pme_problem(double beta, double p, std::size_t n, double T) {
    ProblemSpec prob;
    prob.beta = beta;
    prob.T = T;
    prob.triple = TripleSpec{Grid1D{n, 1.0}, TripleKind::PorousMedium, p, 1.0};
    prob.op = OperatorSpec{PorousMediumSpec{}};
    prob.x0 = bump(prob.triple.grid, 1.0);
    return prob;
}

ProblemSpec plap_problem(double beta, double p, std::size_t n, double T) {
    ProblemSpec prob;
    prob.beta = beta;
    prob.T = T;
    prob.triple = TripleSpec{Grid1D{n, 1.0}, TripleKind::PLaplace, p, 1.0};
    prob.op = OperatorSpec{PLaplaceSpec{}};
    prob.x0 = bump(prob.triple.grid, 1.0);
    return prob;
}

// Pointwise cubic u^3 on the L^2 pivot.
class CubeOperator final : public MonotoneOperator {
public:
    explicit CubeOperator(TripleSpec t) : MonotoneOperator(std::move(t)) {}
    void apply(double, std::span<const double> u, std::span<double> out) const override {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * u[i] * u[i];
    }
    double potential(double, std::span<const double> u) const override {
        double acc = 0.0;
        for (double x : u) acc += x * x * x * x / 4.0;
        return triple().grid.h() * acc;
    }
    Jacobian jacobian(double, std::span<const double> u) const override {
        Tridiagonal j(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) j.diag[i] = 3.0 * u[i] * u[i];
        return j;
    }
    StructuralConstants constants() const override { return {4.0, 1.0, 0.0, 1.0, 0.0}; }
    std::string name() const override { return "cube"; }
};

} // namespace

TEST(Resolvent, LinearScalar) {
    const auto op = make_operator(OperatorSpec{LinearSpec{3.0}}, TripleSpec{Grid1D{1, 1.0}, TripleKind::PLaplace, 2.0, 1.0});
    const std::vector<double> r{2.5};
    const auto u = resolvent_step(*op, 0.2, r, 0.0, SolverConfig{});
    EXPECT_NEAR(u[0], 2.5 / 1.6, 1e-14);
}

TEST(Resolvent, PointwiseCube) {
    const CubeOperator op(TripleSpec{Grid1D{1, 1.0}, TripleKind::PLaplace, 4.0, 1.0});
    const std::vector<double> r{2.0};
    const auto res = resolvent_solve(op, 1.0, r, 0.0, SolverConfig{});
    EXPECT_NEAR(res.u[0], 1.0, 1e-12);
    EXPECT_LE(res.residual, 1e-10);
}

TEST(Resolvent, FirmlyNonexpansiveForPorousMediumAndPLaplace) {
    SolverConfig cfg;
    const std::vector<std::pair<OperatorSpec, TripleSpec>> cases{
        {OperatorSpec{PorousMediumSpec{}}, TripleSpec{Grid1D{32, 1.0}, TripleKind::PorousMedium, 4.0, 1.0}},
        {OperatorSpec{PLaplaceSpec{}}, TripleSpec{Grid1D{32, 1.0}, TripleKind::PLaplace, 3.0, 1.0}},
        {OperatorSpec{PLaplaceSpec{true}}, TripleSpec{Grid1D{32, 1.0}, TripleKind::PLaplace, 4.0, 1.0}},
    };
    for (const auto& [spec, triple] : cases) {
        const auto op = make_operator(spec, triple);
        for (std::uint64_t s = 0; s < 50; ++s) {
            const double c = 0.001 * std::pow(10.0, static_cast<double>(s % 4));
            const auto r1 = random_state(32, 10 * s, 2.0);
            const auto r2 = random_state(32, 10 * s + 1, 2.0);
            const auto a = resolvent_solve(*op, c, r1, 0.0, cfg);
            const auto b = resolvent_solve(*op, c, r2, 0.0, cfg);
            EXPECT_LE(a.residual, cfg.nonlinear_tol * std::max(1.0, op->norm_H(r1)));
            std::vector<double> du(32);
            std::vector<double> dr(32);
            for (std::size_t i = 0; i < 32; ++i) {
                du[i] = a.u[i] - b.u[i];
                dr[i] = r1[i] - r2[i];
            }
            const double nu = op->norm_H(du);
            EXPECT_GE(op->inner_H(du, dr), nu * nu * (1.0 - 1e-9)) << op->name();
            EXPECT_LE(nu, op->norm_H(dr) * (1.0 + 1e-9)) << op->name();
        }
    }
}

TEST(Resolvent, ReportsNonConvergence) {
    const auto prob = pme_problem(0.5, 4.0, 32, 1.0);
    const auto op = make_operator(prob.op, prob.triple);
    SolverConfig cfg;
    cfg.max_newton = 1;
    const auto r = random_state(32, 5, 10.0);
    try {
        (void)resolvent_solve(*op, 1.0, r, 0.0, cfg);
        FAIL() << "expected NonConvergence";
    } catch (const NonConvergence& e) {
        EXPECT_GT(e.last_residual(), 0.0);
        EXPECT_EQ(e.iterations(), 1U);
    }
    EXPECT_THROW((void)resolvent_step(*op, 0.0, r, 0.0, SolverConfig{}), std::invalid_argument);
}

TEST(Solver, MittagLefflerOracle) {
    for (double beta : {0.3, 0.5, 0.8}) {
        SolverConfig cfg;
        cfg.dt = std::ldexp(1.0, -11);
        const auto rec = solve_deterministic(scalar_linear(beta, 1.0), cfg);
        const double exact = mittag_leffler_oracle(beta, -1.0);
        EXPECT_LT(std::fabs(rec.final_state()[0] - exact) / exact, 1e-2) << "beta " << beta;
        EXPECT_EQ(rec.states(0, 0), 1.0);
    }
}

TEST(Solver, GrunwaldSchemeAlsoConverges) {
    SolverConfig cfg;
    cfg.scheme = kernels::MemoryScheme::GrunwaldLetnikov;
    cfg.dt = std::ldexp(1.0, -10);
    const auto rec = solve_deterministic(scalar_linear(0.5, 1.0), cfg);
    const double exact = mittag_leffler_oracle(0.5, -1.0);
    EXPECT_LT(std::fabs(rec.final_state()[0] - exact) / exact, 1e-2);
}

TEST(Solver, BetaOneIsBackwardEuler) {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const auto rec = solve_deterministic(scalar_linear(1.0, 1.0, 2.0), cfg);
    double u = 1.0;
    double worst = 0.0;
    for (std::size_t n = 1; n <= 1000; ++n) {
        u = u / (1.0 + 2.0 * cfg.dt);
        worst = std::max(worst, std::fabs(rec.states(n, 0) - u));
    }
    EXPECT_LT(worst, 1e-12);

    // Porous medium p = 3 against a dense Newton backward Euler.
    auto prob = pme_problem(1.0, 3.0, 16, 0.2);
    cfg.dt = 2e-4;
    const auto pm = solve_deterministic(prob, cfg);
    const double h = prob.triple.grid.h();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(16, 16);
    for (int i = 0; i < 16; ++i) {
        L(i, i) = 2.0 / (h * h);
        if (i > 0) L(i, i - 1) = -1.0 / (h * h);
        if (i < 15) L(i, i + 1) = -1.0 / (h * h);
    }
    Eigen::VectorXd prev = Eigen::Map<const Eigen::VectorXd>(prob.x0.data(), 16);
    worst = 0.0;
    for (std::size_t n = 1; n < pm.states.n_nodes(); ++n) {
        Eigen::VectorXd v = prev;
        for (int it = 0; it < 60; ++it) {
            const Eigen::VectorXd psi = v.cwiseProduct(v.cwiseAbs());
            const Eigen::VectorXd F = v + cfg.dt * L * psi - prev;
            if (F.cwiseAbs().maxCoeff() < 1e-15) break;
            const Eigen::MatrixXd J =
                Eigen::MatrixXd::Identity(16, 16) + cfg.dt * L * (2.0 * v.cwiseAbs()).asDiagonal().toDenseMatrix();
            v -= J.partialPivLu().solve(F);
        }
        for (int i = 0; i < 16; ++i) worst = std::max(worst, std::fabs(pm.states(n, static_cast<std::size_t>(i)) - v(i)));
        prev = v;
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Solver, StationaryStateStaysPut) {
    auto prob = pme_problem(0.6, 3.0, 20, 0.5);
    const auto op = make_operator(prob.op, prob.triple);
    const auto ax0 = op->apply(0.0, prob.x0);
    prob.forcing = [ax0](double, std::span<double> out) { std::copy(ax0.begin(), ax0.end(), out.begin()); };
    SolverConfig cfg;
    cfg.dt = 0.01;
    const auto rec = solve_deterministic(prob, cfg);
    for (std::size_t n = 0; n < rec.states.n_nodes(); ++n)
        for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(rec.states(n, i), prob.x0[i], 1e-12);
    EXPECT_LT(integral_equation_residual(rec, prob), 1e-10);
}

TEST(Solver, IntegralEquationResidualUnderRefinement) {
    // Relaxation data: the first node carries an O(dt^beta) mismatch with a
    // factor 1 / (1 + Gamma(2 - beta) dt^beta), so local rates climb toward beta.
    const auto prob = scalar_linear(0.5, 1.0);
    std::vector<double> residuals;
    for (double dt : {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024}) {
        SolverConfig cfg;
        cfg.dt = dt;
        residuals.push_back(integral_equation_residual(solve_deterministic(prob, cfg), prob));
    }
    double previous_rate = 0.0;
    for (std::size_t i = 1; i < residuals.size(); ++i) {
        EXPECT_LT(residuals[i], residuals[i - 1]);
        const double rate = std::log2(residuals[i - 1] / residuals[i]);
        EXPECT_GT(rate, previous_rate);
        EXPECT_LT(rate, 0.5);
        previous_rate = rate;
    }

    SolverConfig cfg;
    cfg.dt = 1.0 / 256;
    auto rec = solve_deterministic(prob, cfg);
    rec.states(100, 0) += 0.1;
    EXPECT_GT(integral_equation_residual(rec, prob), 0.01);
}

TEST(Solver, IntegralEquationResidualRateOnSmoothSolution) {
    // u(t) = t^2 solves D^beta u + u = 2 t^(2-beta) / Gamma(3-beta) + t^2.
    for (double beta : {0.3, 0.5, 0.8}) {
        auto prob = scalar_linear(beta, 1.0, 1.0, 0.0);
        const double g = std::tgamma(3.0 - beta);
        prob.forcing = [beta, g](double t, std::span<double> out) {
            out[0] = 2.0 * std::pow(t, 2.0 - beta) / g + t * t;
        };
        std::vector<double> dts{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
        std::vector<double> residuals;
        for (double dt : dts) {
            SolverConfig cfg;
            cfg.dt = dt;
            residuals.push_back(integral_equation_residual(solve_deterministic(prob, cfg), prob));
        }
        const double rate = std::log2(residuals.front() / residuals.back()) / 3.0;
        EXPECT_GE(rate, beta) << "beta " << beta;
    }
}

TEST(Solver, DiscreteStabilityInH) {
    const std::vector<ProblemSpec> bases{pme_problem(0.4, 3.0, 24, 0.5), pme_problem(0.7, 4.0, 24, 0.5),
                                         plap_problem(0.4, 3.0, 24, 0.5)};
    SolverConfig cfg;
    cfg.dt = 0.005;
    std::uint64_t seed = 1;
    for (const auto& base : bases) {
        const auto op = make_operator(base.op, base.triple);
        for (int trial = 0; trial < 4; ++trial) {
            auto p1 = base;
            auto p2 = base;
            p1.x0 = random_state(24, seed++, 1.5);
            p2.x0 = random_state(24, seed++, 1.5);
            const auto a = solve_deterministic(p1, cfg);
            const auto b = solve_deterministic(p2, cfg);
            std::vector<double> d(24);
            for (std::size_t i = 0; i < 24; ++i) d[i] = p1.x0[i] - p2.x0[i];
            const double initial = op->norm_H(d);
            double worst = 0.0;
            for (std::size_t n = 0; n < a.states.n_nodes(); ++n) {
                for (std::size_t i = 0; i < 24; ++i) d[i] = a.states(n, i) - b.states(n, i);
                worst = std::max(worst, op->norm_H(d));
            }
            EXPECT_LE(worst, (1.0 + 1e-10) * initial);
        }
    }
}

TEST(Analysis, ObservedOrders) {
    const std::vector<double> dts{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    {
        const auto prob = scalar_linear(0.5, 1.0);
        const auto est = estimate_order(prob, SolverConfig{}, dts, std::vector<double>{mittag_leffler_oracle(0.5, -1.0)});
        EXPECT_GE(est.order, 0.5);
        EXPECT_TRUE(est.monotone);
    }
    {
        SolverConfig cfg;
        cfg.scheme = kernels::MemoryScheme::GrunwaldLetnikov;
        const auto prob = scalar_linear(1.0, 1.0);
        const auto est = estimate_order(prob, cfg, dts, std::vector<double>{std::exp(-1.0)});
        EXPECT_NEAR(est.order, 1.0, 0.1);
    }
    {
        const auto prob = pme_problem(0.6, 3.0, 16, 0.25);
        const std::vector<double> coarse{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
        const auto est = estimate_order(prob, SolverConfig{}, coarse);
        EXPECT_GT(est.order, 0.0);
        EXPECT_EQ(est.errors.size(), 3U);
    }
    EXPECT_THROW((void)estimate_order(scalar_linear(0.5, 1.0), SolverConfig{}, std::vector<double>{0.1, 0.05}),
                 std::invalid_argument);
}

TEST(Analysis, DecayExponents) {
    SolverConfig cfg;
    cfg.dt = 0.05;
    const auto rec = solve_deterministic(scalar_linear(0.5, 100.0), cfg);
    const auto est = estimate_decay_exponent(rec, 0.5);
    EXPECT_NEAR(est.exponent, -0.5, 0.05);
    EXPECT_FALSE(est.exponential);

    cfg.dt = 0.01;
    const auto euler = solve_deterministic(scalar_linear(1.0, 10.0), cfg);
    EXPECT_TRUE(estimate_decay_exponent(euler, 0.5).exponential);

    const auto zero = solve_deterministic(scalar_linear(0.5, 1.0, 1.0, 0.0), cfg);
    EXPECT_THROW((void)estimate_decay_exponent(zero, 0.5), std::domain_error);
}

TEST(Solver, StepCountAndValidation) {
    EXPECT_EQ(step_count(1.0, 0.1), 10U);
    EXPECT_EQ(step_count(1.0, std::ldexp(1.0, -11)), 2048U);
    EXPECT_THROW((void)step_count(1.0, 0.3), std::invalid_argument);
    SolverConfig cfg;
    cfg.dt = 0.1;
    auto prob = scalar_linear(0.5, 1.0);
    prob.beta = 1.2;
    EXPECT_THROW((void)solve_deterministic(prob, cfg), std::invalid_argument);
    prob = scalar_linear(0.5, 1.0);
    prob.x0 = {1.0, 2.0};
    EXPECT_THROW((void)solve_deterministic(prob, cfg), std::invalid_argument);
    cfg.damping = 0.0;
    EXPECT_THROW((void)solve_deterministic(scalar_linear(0.5, 1.0), cfg), std::invalid_argument);
}

TEST(Solver, NonConvergenceCarriesNode) {
    auto prob = pme_problem(0.5, 4.0, 32, 0.1);
    prob.x0 = random_state(32, 3, 5.0);
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.max_newton = 1;
    try {
        (void)solve_deterministic(prob, cfg);
        FAIL() << "expected NonConvergence";
    } catch (const NonConvergence& e) {
        ASSERT_TRUE(e.node.has_value());
        EXPECT_EQ(*e.node, 1U);
    }
}

TEST(Export, CsvAndBinaryDump) {
    SolverConfig cfg;
    cfg.dt = 0.25;
    const auto prob = pme_problem(0.5, 3.0, 4, 1.0);
    const auto rec = solve_deterministic(prob, cfg);
    std::ostringstream csv;
    write_trajectory_csv(csv, rec, {"beta=0.5"});
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "# beta=0.5");
    std::getline(lines, line);
    EXPECT_EQ(line, "t,norm_H,norm_V,newton_iters,residual");
    std::getline(lines, line);
    EXPECT_EQ(line.substr(0, 2), "0,");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 4);

    const auto path = std::filesystem::temp_directory_path() / "fracmono_dump_test.bin";
    write_state_dump(path, rec);
    EXPECT_EQ(std::filesystem::file_size(path), 32U + 5U * 4U * 8U);
    const auto dump = read_state_dump(path);
    EXPECT_EQ(dump.beta, 0.5);
    EXPECT_EQ(dump.dt, 0.25);
    EXPECT_EQ(dump.states, rec.states);
    std::filesystem::remove(path);
}
