#include "fracmono/verify/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fracmono/abstractcore/lambda.hpp"
#include "fracmono/abstractcore/yosida.hpp"
#include "fracmono/kernels/gamma.hpp"
#include "fracmono/kernels/mittag_leffler.hpp"
#include "fracmono/kernels/random.hpp"
#include "fracmono/kernels/subordinator.hpp"
#include "fracmono/kernels/weights.hpp"
#include "fracmono/operators/structural.hpp"
#include "fracmono/stepper/analysis.hpp"
#include "fracmono/stepper/resolvent.hpp"
#include "fracmono/stepper/solver.hpp"
#include "fracmono/stochastic/noise.hpp"
#include "fracmono/stochastic/spde.hpp"

namespace fracmono::verify {

namespace {

using namespace operators;

InvariantResult make_result(std::string suite, std::string name, bool passed, double margin, std::string detail) {
    InvariantResult r;
    r.suite = std::move(suite);
    r.name = std::move(name);
    r.passed = passed && std::isfinite(margin);
    r.margin = margin;
    r.detail = std::move(detail);
    return r;
}

// margin = bound - value, pass iff value <= bound.
InvariantResult at_most(std::string suite, std::string name, double value, double bound, const std::string& what) {
    std::ostringstream d;
    d << what << " = " << value << " (bound " << bound << ")";
    return make_result(std::move(suite), std::move(name), value <= bound, bound - value, d.str());
}

std::vector<double> random_state(std::size_t n, std::uint64_t seed, double scale) {
    kernels::CounterRng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (2.0 * rng.uniform_open() - 1.0);
    return v;
}

std::vector<double> bump(const Grid1D& grid) {
    std::vector<double> v(grid.n_interior);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid.x(i) / grid.length;
        v[i] = std::sin(std::numbers::pi * x) * (1.0 + 0.5 * std::cos(3.0 * std::numbers::pi * x));
    }
    return v;
}

stepper::ProblemSpec scalar_linear(double beta, double T, double lambda, double x0) {
    stepper::ProblemSpec p;
    p.beta = beta;
    p.T = T;
    p.x0 = {x0};
    p.op = OperatorSpec{LinearSpec{lambda}, std::nullopt};
    p.triple = TripleSpec{Grid1D{1, 1.0}, TripleKind::PLaplace, 2.0, 1.0};
    return p;
}

stepper::ProblemSpec nonlinear_problem(std::string_view kind, double beta, std::size_t n, double T) {
    stepper::ProblemSpec p;
    p.beta = beta;
    p.T = T;
    if (kind == "pme3" || kind == "pme4") {
        p.triple = TripleSpec{Grid1D{n, 1.0}, TripleKind::PorousMedium, kind == "pme3" ? 3.0 : 4.0, 1.0};
        p.op = OperatorSpec{PorousMediumSpec{}, std::nullopt};
    } else if (kind == "plaplace3") {
        p.triple = TripleSpec{Grid1D{n, 1.0}, TripleKind::PLaplace, 3.0, 1.0};
        p.op = OperatorSpec{PLaplaceSpec{}, std::nullopt};
    } else {
        throw std::invalid_argument("unknown problem kind " + std::string(kind));
    }
    p.x0 = bump(p.triple.grid);
    return p;
}

double mittag_leffler_series(double beta, double z) {
    using Big = boost::multiprecision::cpp_dec_float_100;
    Big sum = 0;
    Big power = 1;
    for (int k = 0; k < 300; ++k) {
        sum += power / boost::math::tgamma(Big(beta) * k + 1);
        power *= Big(z);
    }
    return static_cast<double>(sum);
}

std::vector<double> faulted_gl(double beta, std::size_t n, const VerifyOptions& options) {
    auto w = kernels::grunwald_weights(beta, n);
    if (options.gl_fault) options.gl_fault(w);
    return w;
}

stochastic::NoiseSpec scalar_noise(double gamma, double b) {
    stochastic::NoiseSpec n;
    n.gamma = gamma;
    n.B = {Eigen::MatrixXd::Constant(1, 1, b)};
    return n;
}

NodalSeries yosida_forcing(const Grid1D& grid, std::size_t n_time, double dt) {
    NodalSeries f(n_time, grid.n_interior);
    const double T = static_cast<double>(n_time) * dt;
    for (std::size_t k = 0; k < n_time; ++k)
        for (std::size_t i = 0; i < grid.n_interior; ++i)
            f(k, i) = 10.0 * std::sin(std::numbers::pi * grid.x(i)) * (1.0 + static_cast<double>(k + 1) * dt / T);
    return f;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

} // namespace

std::string_view to_string(Suite suite) {
    switch (suite) {
    case Suite::Kernels: return "kernels";
    case Suite::Operators: return "operators";
    case Suite::Stepper: return "stepper";
    case Suite::Stochastic: return "stochastic";
    case Suite::Yosida: return "yosida";
    case Suite::All: return "all";
    }
    return "unknown";
}

Suite suite_from_string(std::string_view name) {
    for (auto s : {Suite::Kernels, Suite::Operators, Suite::Stepper, Suite::Stochastic, Suite::Yosida, Suite::All})
        if (to_string(s) == name) return s;
    throw std::invalid_argument("unknown suite '" + std::string(name) +
                                "' (expected kernels, operators, stepper, stochastic, yosida or all)");
}

bool SuiteReport::passed() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
    return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; }));
}

// ---- kernels ----

InvariantResult check_gl_closed_form(const VerifyOptions& options) {
    double worst = 0.0;
    for (int b = 1; b <= 9; ++b) {
        const double beta = 0.1 * b;
        const auto w = faulted_gl(beta, 1000, options);
        const double g = boost::math::tgamma(-beta);
        for (std::size_t k = 0; k <= 1000; ++k) {
            // w_k = Gamma(k - beta) / (Gamma(-beta) Gamma(k + 1))
            const double exact =
                k == 0 ? 1.0 : boost::math::tgamma_delta_ratio(static_cast<double>(k) - beta, 1.0 + beta) / g;
            worst = std::max(worst, std::fabs(w[k] - exact) / std::fabs(exact));
        }
    }
    return at_most("kernels", "gl_weights_closed_form", worst, 1e-13, "max relative error");
}

InvariantResult check_gl_signs(const VerifyOptions& options) {
    double margin = std::numeric_limits<double>::infinity();
    for (int b = 1; b <= 9; ++b) {
        const auto w = faulted_gl(0.1 * b, 1000, options);
        double partial = w[0];
        margin = std::min(margin, w[0] - 1.0 == 0.0 ? 1.0 : -std::fabs(w[0] - 1.0));
        for (std::size_t k = 1; k < w.size(); ++k) {
            margin = std::min(margin, -w[k]);
            partial += w[k];
            margin = std::min(margin, partial);
        }
    }
    return make_result("kernels", "gl_weights_sign_and_partial_sums", margin > 0.0, margin,
                       "min of -w_k (k >= 1) and of the partial sums");
}

InvariantResult check_l1_coefficients() {
    double margin = std::numeric_limits<double>::infinity();
    for (int b = 1; b <= 9; ++b) {
        const auto c = kernels::l1_coefficients(0.1 * b, 1000);
        for (std::size_t k = 0; k < c.size(); ++k) {
            margin = std::min(margin, c[k]);
            if (k > 0) margin = std::min(margin, c[k - 1] - c[k]);
        }
    }
    return make_result("kernels", "l1_positive_decreasing", margin > 0.0, margin, "min of b_j and b_{j-1} - b_j");
}

InvariantResult check_kernel_semigroup(double a, double b) {
    std::vector<double> errors;
    for (std::size_t n : {64U, 256U, 1024U}) {
        const double dt = 1.0 / static_cast<double>(n);
        NodalSeries g(n + 1, 1);
        for (std::size_t k = 1; k <= n; ++k) g(k, 0) = kernels::riemann_liouville_kernel(b, static_cast<double>(k) * dt);
        const auto conv = kernels::fractional_integral(g, a, dt);
        double worst = 0.0;
        for (std::size_t k = n / 4; k <= n; ++k) {
            const double t = static_cast<double>(k) * dt;
            worst = std::max(worst, std::fabs(conv(k, 0) - kernels::riemann_liouville_kernel(a + b, t)));
        }
        errors.push_back(worst);
    }
    const double need = 0.8 * std::min(a, b);
    const double r1 = std::log(errors[0] / errors[1]) / std::log(4.0);
    const double r2 = std::log(errors[1] / errors[2]) / std::log(4.0);
    const double margin = std::min(r1, r2) - need;
    std::ostringstream name;
    name << "kernel_semigroup_" << a << "_" << b;
    return make_result("kernels", name.str(), margin >= 0.0, margin,
                       fmt("errors %.3g %.3g %.3g", errors[0], errors[1], errors[2]) +
                           fmt(", orders %.3f %.3f (need %.3f)", r1, r2, need));
}

InvariantResult check_half_half_analytic() {
    const double value = boost::math::beta(0.5, 0.5) / (boost::math::tgamma(0.5) * boost::math::tgamma(0.5));
    return at_most("kernels", "g_half_star_g_half_is_one", std::fabs(value - 1.0), 1e-15, "|B(1/2,1/2)/Gamma(1/2)^2 - 1|");
}

InvariantResult check_left_inverse() {
    auto error_at = [](std::size_t n, kernels::MemoryScheme scheme) {
        const double dt = 1.0 / static_cast<double>(n);
        NodalSeries f(n + 1, 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) * dt;
            f(k, 0) = std::sin(3.0 * t) + t * t;
        }
        const auto integral = kernels::fractional_integral(f, 0.6, dt);
        const std::vector<double> x0{0.0};
        const auto back = kernels::caputo_derivative(integral, x0, 0.6, dt, scheme);
        double worst = 0.0;
        for (std::size_t k = n / 2; k <= n; ++k) worst = std::max(worst, std::fabs(back(k, 0) - f(k, 0)));
        return worst;
    };
    double margin = std::numeric_limits<double>::infinity();
    std::ostringstream d;
    for (auto scheme : {kernels::MemoryScheme::L1, kernels::MemoryScheme::GrunwaldLetnikov}) {
        const double e1 = error_at(64, scheme);
        const double e2 = error_at(256, scheme);
        const double e3 = error_at(1024, scheme);
        margin = std::min({margin, e1 - e2, e2 - e3});
        d << kernels::to_string(scheme) << ": " << e1 << " " << e2 << " " << e3 << "; ";
    }
    return make_result("kernels", "left_inverse_under_refinement", margin > 0.0, margin, d.str());
}

InvariantResult check_l1_square_inequality(std::uint64_t seed, std::size_t sequences) {
    const std::size_t n = 40;
    const double dt = 0.05;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sequences; ++s) {
        const double beta = 0.05 + 0.9 * static_cast<double>(s % 19) / 18.0;
        kernels::CounterRng rng(seed + s);
        NodalSeries u(n + 1, 1);
        NodalSeries u2(n + 1, 1);
        for (std::size_t k = 1; k <= n; ++k) {
            u(k, 0) = 4.0 * rng.uniform_open() - 2.0;
            u2(k, 0) = u(k, 0) * u(k, 0);
        }
        const std::vector<double> x0{0.0};
        const auto du = kernels::caputo_derivative(u, x0, beta, dt);
        const auto du2 = kernels::caputo_derivative(u2, x0, beta, dt);
        for (std::size_t k = 1; k <= n; ++k) {
            const double gap = u(k, 0) * du(k, 0) - 0.5 * du2(k, 0);
            margin = std::min(margin, gap + 1e-12 * (1.0 + std::fabs(u(k, 0) * du(k, 0))));
        }
    }
    return make_result("kernels", "l1_square_inequality", margin >= 0.0, margin,
                       "min of u_n (D u)_n - (D u^2)_n / 2 over random sequences");
}

InvariantResult check_mittag_leffler_monotone() {
    double margin = std::numeric_limits<double>::infinity();
    for (double beta : {0.2, 0.5, 0.8, 1.0}) {
        double previous = 1.0;
        for (int i = 0; i <= 500; ++i) {
            const double z = -0.1 * i;
            const double e = kernels::mittag_leffler(beta, z);
            margin = std::min({margin, e, 1.0 - e + 1e-15, previous - e + 1e-15});
            previous = e;
        }
    }
    return make_result("kernels", "mittag_leffler_completely_monotone", margin > 0.0, margin,
                       "positivity, <= 1 and monotonicity on [-50, 0]");
}

InvariantResult check_subordinator(double beta, double lambda, double t, std::size_t draws, std::uint64_t seed) {
    const auto sample = kernels::sample_stable_subordinator(beta, t, draws, seed);
    double mean = 0.0;
    double m2 = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (double s : sample.values) {
        const double y = std::exp(-lambda * s);
        mean += y;
        m2 += y * y;
        smallest = std::min(smallest, s);
    }
    const auto n = static_cast<double>(draws);
    mean /= n;
    const double var = (m2 - n * mean * mean) / (n - 1.0);
    const double se = std::sqrt(var / n);
    const double exact = std::exp(-t * std::pow(lambda, beta));
    const double dev = std::fabs(mean - exact);
    std::ostringstream name;
    name << "subordinator_laplace_" << beta << "_" << lambda << "_" << t;
    std::ostringstream d;
    d << "mean " << mean << " vs " << exact << ", " << dev / se << " SE, min draw " << smallest;
    return make_result("kernels", name.str(), dev <= 3.0 * se && smallest > 0.0, (3.0 * se - dev) / se, d.str());
}

// ---- operators ----

InvariantResult check_structural(std::string_view kind, std::size_t trials, std::uint64_t seed, std::size_t threads) {
    OperatorSpec spec;
    TripleSpec triple;
    StateSampler sampler;
    const Grid1D grid{32, 1.0};
    if (kind == "pme3" || kind == "pme4") {
        triple = TripleSpec{grid, TripleKind::PorousMedium, kind == "pme3" ? 3.0 : 4.0, 1.0};
        spec.kind = PorousMediumSpec{};
    } else if (kind == "pme_fractional") {
        triple = TripleSpec{grid, TripleKind::PorousMedium, 3.0, 0.5};
        PorousMediumSpec pm;
        pm.alpha_frac = 0.5;
        spec.kind = pm;
    } else if (kind == "plaplace3" || kind == "plaplace3_perturbed") {
        triple = TripleSpec{grid, TripleKind::PLaplace, 3.0, 1.0};
        spec.kind = PLaplaceSpec{kind == "plaplace3_perturbed"};
        sampler.kind = SamplerKind::SineSeries;
    } else {
        throw std::invalid_argument("unknown structural case " + std::string(kind));
    }
    StructuralOptions opts;
    opts.threads = static_cast<unsigned>(std::max<std::size_t>(1, threads));
    const auto report = verify_structural_conditions(spec, triple, sampler, trials, seed, opts);
    const double worst = std::min({report.hemicontinuity.worst_margin, report.monotonicity.worst_margin,
                                   report.coercivity.worst_margin, report.growth.worst_margin});
    std::ostringstream d;
    d << "H1 " << report.hemicontinuity.worst_margin << ", H2 " << report.monotonicity.worst_margin << ", H3 "
      << report.coercivity.worst_margin << ", H4 " << report.growth.worst_margin << " over " << report.samples
      << " states (delta=" << report.constants.delta << ", p=" << report.constants.exponent
      << ", C=" << report.constants.C << ")";
    for (const auto* c : {&report.hemicontinuity, &report.monotonicity, &report.coercivity, &report.growth})
        if (!c->passed) d << "; " << c->name << " failed: " << c->detail;
    return make_result("operators", "structural_" + std::string(kind), report.all_passed(), worst + opts.tolerance,
                       d.str());
}

InvariantResult check_dual_pairing(std::uint64_t seed) {
    double worst = 0.0;
    for (auto kind : {TripleKind::PorousMedium, TripleKind::PLaplace}) {
        for (double pivot : {1.0, 0.5}) {
            if (kind == TripleKind::PLaplace && pivot != 1.0) continue;
            const TripleSpec triple{Grid1D{40, 1.0}, kind, 3.0, pivot};
            for (std::uint64_t s = 0; s < 50; ++s) {
                const auto u = random_state(40, seed + 2 * s, 1.0);
                const auto v = random_state(40, seed + 2 * s + 1, 1.0);
                const double a = dual_pairing(triple, u, v);
                const double b = h_inner(triple, u, v);
                const double scale = norm_H(triple, u) * norm_H(triple, v) + norm_Vstar(triple, u) * norm_V(triple, v);
                worst = std::max(worst, std::fabs(a - b) / scale);
            }
        }
    }
    return at_most("operators", "dual_pairing_consistency", worst, 1e-10, "max scaled |<u,v>_{V*,V} - <u,v>_H|");
}

InvariantResult check_zero_gap(std::uint64_t seed) {
    double worst = 0.0;
    const std::vector<std::pair<OperatorSpec, TripleSpec>> cases{
        {OperatorSpec{PorousMediumSpec{}, std::nullopt}, TripleSpec{Grid1D{24, 1.0}, TripleKind::PorousMedium, 3.0, 1.0}},
        {OperatorSpec{PLaplaceSpec{}, std::nullopt}, TripleSpec{Grid1D{24, 1.0}, TripleKind::PLaplace, 3.0, 1.0}},
        {OperatorSpec{PLaplaceSpec{true}, std::nullopt}, TripleSpec{Grid1D{24, 1.0}, TripleKind::PLaplace, 4.0, 1.0}},
    };
    for (const auto& [spec, triple] : cases) {
        const auto op = make_operator(spec, triple);
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto u = random_state(24, seed + s, 2.0);
            const auto a = op->apply(0.0, u);
            const auto b = op->apply(0.0, u);
            std::vector<double> da(24);
            std::vector<double> du(24, 0.0);
            for (std::size_t i = 0; i < 24; ++i) da[i] = a[i] - b[i];
            worst = std::max(worst, std::fabs(op->pairing(da, du)));
            const auto zero = op->apply(0.0, du);
            for (double x : zero) worst = std::max(worst, std::fabs(x));
        }
    }
    return at_most("operators", "zero_gap_and_A0_is_0", worst, 0.0, "max |gap(u,u)|, |A(0)|");
}

// ---- stepper ----

InvariantResult check_mittag_leffler_oracle(double beta) {
    stepper::SolverConfig cfg;
    cfg.dt = std::ldexp(1.0, -11);
    const auto rec = stepper::solve_deterministic(scalar_linear(beta, 1.0, 1.0, 1.0), cfg);
    const double exact = mittag_leffler_series(beta, -1.0);
    const double rel = std::fabs(rec.final_state()[0] - exact) / exact;
    std::ostringstream name;
    name << "mittag_leffler_oracle_beta_" << beta;
    return at_most("stepper", name.str(), rel, 1e-2, "relative error at T=1");
}

InvariantResult check_backward_euler() {
    stepper::SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.scheme = kernels::MemoryScheme::GrunwaldLetnikov;
    const auto rec = stepper::solve_deterministic(scalar_linear(1.0, 1.0, 2.0, 1.0), cfg);
    double u = 1.0;
    double worst_linear = 0.0;
    for (std::size_t n = 1; n < rec.states.n_nodes(); ++n) {
        u = u / (1.0 + 2.0 * cfg.dt);
        worst_linear = std::max(worst_linear, std::fabs(rec.states(n, 0) - u));
    }

    auto prob = nonlinear_problem("pme3", 1.0, 16, 0.2);
    cfg.dt = 2e-4;
    const auto pm = stepper::solve_deterministic(prob, cfg);
    const double h = prob.triple.grid.h();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(16, 16);
    for (int i = 0; i < 16; ++i) {
        L(i, i) = 2.0 / (h * h);
        if (i > 0) L(i, i - 1) = -1.0 / (h * h);
        if (i < 15) L(i, i + 1) = -1.0 / (h * h);
    }
    Eigen::VectorXd prev = Eigen::Map<const Eigen::VectorXd>(prob.x0.data(), 16);
    double worst_pme = 0.0;
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
        for (int i = 0; i < 16; ++i)
            worst_pme = std::max(worst_pme, std::fabs(pm.states(n, static_cast<std::size_t>(i)) - v(i)));
        prev = v;
    }
    const double worst = std::max(worst_linear, worst_pme);
    return at_most("stepper", "beta_one_is_backward_euler", worst, 1e-12,
                   fmt("max-norm gap (linear %.3g, porous medium %.3g)", worst_linear, worst_pme));
}

InvariantResult check_stability(std::string_view kind, double beta, std::size_t pairs, std::uint64_t seed) {
    const auto base = nonlinear_problem(kind, beta, 24, 0.5);
    const auto op = make_operator(base.op, base.triple);
    stepper::SolverConfig cfg;
    cfg.dt = 0.005;
    double worst_ratio = 0.0;
    for (std::size_t trial = 0; trial < pairs; ++trial) {
        auto p1 = base;
        auto p2 = base;
        p1.x0 = random_state(24, seed + 2 * trial, 1.5);
        p2.x0 = random_state(24, seed + 2 * trial + 1, 1.5);
        const auto a = stepper::solve_deterministic(p1, cfg);
        const auto b = stepper::solve_deterministic(p2, cfg);
        std::vector<double> d(24);
        for (std::size_t i = 0; i < 24; ++i) d[i] = p1.x0[i] - p2.x0[i];
        const double initial = op->norm_H(d);
        for (std::size_t n = 0; n < a.states.n_nodes(); ++n) {
            for (std::size_t i = 0; i < 24; ++i) d[i] = a.states(n, i) - b.states(n, i);
            worst_ratio = std::max(worst_ratio, op->norm_H(d) / initial);
        }
    }
    std::ostringstream name;
    name << "discrete_stability_" << kind << "_beta_" << beta;
    return at_most("stepper", name.str(), worst_ratio, 1.0 + 1e-10, "max_n ||u1_n - u2_n||_H / ||x1 - x2||_H");
}

InvariantResult check_resolvent_nonexpansive(std::uint64_t seed) {
    stepper::SolverConfig cfg;
    const std::vector<std::pair<OperatorSpec, TripleSpec>> cases{
        {OperatorSpec{PorousMediumSpec{}, std::nullopt}, TripleSpec{Grid1D{32, 1.0}, TripleKind::PorousMedium, 4.0, 1.0}},
        {OperatorSpec{PLaplaceSpec{}, std::nullopt}, TripleSpec{Grid1D{32, 1.0}, TripleKind::PLaplace, 3.0, 1.0}},
    };
    double worst = 0.0;
    for (const auto& [spec, triple] : cases) {
        const auto op = make_operator(spec, triple);
        for (std::uint64_t s = 0; s < 30; ++s) {
            const double c = 0.001 * std::pow(10.0, static_cast<double>(s % 4));
            const auto r1 = random_state(32, seed + 2 * s, 2.0);
            const auto r2 = random_state(32, seed + 2 * s + 1, 2.0);
            const auto a = stepper::resolvent_step(*op, c, r1, 0.0, cfg);
            const auto b = stepper::resolvent_step(*op, c, r2, 0.0, cfg);
            std::vector<double> du(32);
            std::vector<double> dr(32);
            for (std::size_t i = 0; i < 32; ++i) {
                du[i] = a[i] - b[i];
                dr[i] = r1[i] - r2[i];
            }
            worst = std::max(worst, op->norm_H(du) / op->norm_H(dr));
        }
    }
    return at_most("stepper", "resolvent_nonexpansive", worst, 1.0 + 1e-9, "max ||J r1 - J r2||_H / ||r1 - r2||_H");
}

InvariantResult check_integral_equation_rate() {
    double margin = std::numeric_limits<double>::infinity();
    std::ostringstream d;
    for (double beta : {0.3, 0.5, 0.8}) {
        auto prob = scalar_linear(beta, 1.0, 1.0, 0.0);
        const double g = std::tgamma(3.0 - beta);
        prob.forcing = [beta, g](double t, std::span<double> out) { out[0] = 2.0 * std::pow(t, 2.0 - beta) / g + t * t; };
        std::vector<double> residuals;
        for (double dt : {1.0 / 32, 1.0 / 256}) {
            stepper::SolverConfig cfg;
            cfg.dt = dt;
            residuals.push_back(stepper::integral_equation_residual(stepper::solve_deterministic(prob, cfg), prob));
        }
        const double rate = std::log2(residuals[0] / residuals[1]) / 3.0;
        margin = std::min(margin, rate - beta);
        d << "beta " << beta << ": rate " << rate << "; ";
    }
    return make_result("stepper", "integral_equation_rate_at_least_beta", margin >= 0.0, margin, d.str());
}

// ---- stochastic ----

InvariantResult check_noise_gate() {
    using stochastic::NoiseRegularity;
    auto noise = scalar_noise(0.9, 1.0);
    const bool a = stochastic::validate_noise(0.5, noise).ok;
    const auto rejected = stochastic::validate_noise(0.3, noise);
    const bool b = !rejected.ok && rejected.reason.find("gamma < beta + 1/2") != std::string::npos;
    auto sq = scalar_noise(0.5, 1.0);
    sq.regularity = NoiseRegularity::SquareIntegrableInTime;
    const bool c = stochastic::validate_noise(0.5, sq).ok;
    const bool ok = a && b && c;
    return make_result("stochastic", "noise_gate_examples", ok, ok ? 1.0 : -1.0,
                       "(0.5,0.9,bounded) accepted; (0.3,0.9) rejected: " + rejected.reason +
                           "; (0.5,0.5,square integrable) accepted");
}

InvariantResult check_gate_soundness() {
    double margin = std::numeric_limits<double>::infinity();
    std::size_t checked = 0;
    for (int bi = 1; bi <= 20; ++bi) {
        for (int gi = 1; gi <= 40; ++gi) {
            const double beta = 0.05 * bi;
            const double gamma = 0.025 * gi;
            for (auto reg : {stochastic::NoiseRegularity::BoundedInTime,
                             stochastic::NoiseRegularity::SquareIntegrableInTime}) {
                auto noise = scalar_noise(gamma, 1.0);
                noise.regularity = reg;
                const double exponent = 2.0 * (beta - gamma);
                if (stochastic::validate_noise(beta, noise).ok) {
                    const double v = stochastic::convolution_variance(beta, gamma, 1.0, 1.0);
                    margin = std::min(margin, std::isfinite(v) ? exponent + 1.0 : -1.0);
                    ++checked;
                } else if (gamma >= beta + 0.5) {
                    margin = std::min(margin, -1.0 - exponent + 1e-12);
                    ++checked;
                }
            }
        }
    }
    return make_result("stochastic", "gate_soundness", margin > 0.0, margin,
                       "accepted: 2(beta-gamma) > -1 and finite variance; rejected with gamma >= beta+1/2: "
                       "2(beta-gamma) <= -1; " + std::to_string(checked) + " triples");
}

InvariantResult check_variance_law(double beta, double gamma, std::size_t paths, std::uint64_t seed, double k_se) {
    const std::size_t n_steps = 256;
    const double dt = 1.0 / static_cast<double>(n_steps);
    const auto noise = scalar_noise(gamma, 1.0);
    std::vector<double> x(paths);
    for (std::size_t i = 0; i < paths; ++i)
        x[i] = stochastic::fractional_convolution_path(noise, beta, dt, n_steps, seed + i)(n_steps, 0);
    const auto n = static_cast<double>(paths);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double c = (v - mean) * (v - mean);
        m2 += c;
        m4 += c * c;
    }
    const double var = m2 / (n - 1.0);
    const double se = std::sqrt(std::max(0.0, m4 / n - (m2 / n) * (m2 / n)) / n);
    const double exact = stochastic::convolution_variance(beta, gamma, 1.0, 1.0);
    const double dev = std::fabs(var - exact);
    const double rel_bound = 4.0 / std::sqrt(n) * exact;
    const double bound = std::min(k_se * se, rel_bound);
    std::ostringstream name;
    name << "variance_law_" << beta << "_" << gamma;
    std::ostringstream d;
    d << "Var F(1) " << var << " vs " << exact << ": " << dev / se << " SE, relative " << dev / exact;
    return make_result("stochastic", name.str(), dev <= bound, (bound - dev) / se, d.str());
}

InvariantResult check_centered(std::size_t paths, std::uint64_t seed) {
    stochastic::NoiseSpec noise;
    noise.gamma = 0.25;
    noise.B = {Eigen::MatrixXd(3, 2)};
    noise.B.front() << 1.0, 0.0, 0.5, 0.5, 0.0, 2.0;
    const std::size_t n_steps = 64;
    std::vector<double> sum(3, 0.0);
    std::vector<double> sum2(3, 0.0);
    for (std::size_t i = 0; i < paths; ++i) {
        const auto path = stochastic::fractional_convolution_path(noise, 0.5, 1.0 / n_steps, n_steps, seed + i);
        for (std::size_t c = 0; c < 3; ++c) {
            const double v = path(n_steps, c);
            sum[c] += v;
            sum2[c] += v * v;
        }
    }
    const auto n = static_cast<double>(paths);
    double margin = std::numeric_limits<double>::infinity();
    std::ostringstream d;
    for (std::size_t c = 0; c < 3; ++c) {
        const double mean = sum[c] / n;
        const double se = std::sqrt((sum2[c] - n * mean * mean) / (n - 1.0) / n);
        margin = std::min(margin, 4.0 - std::fabs(mean) / se);
        d << "component " << c << ": " << std::fabs(mean) / se << " SE; ";
    }
    return make_result("stochastic", "convolution_centered", margin >= 0.0, margin, d.str());
}

InvariantResult check_path_determinism(std::uint64_t seed) {
    const auto noise = scalar_noise(0.7, 1.0);
    const auto a = stochastic::fractional_convolution_path(noise, 0.5, 0.01, 100, seed);
    const auto b = stochastic::fractional_convolution_path(noise, 0.5, 0.01, 100, seed);
    const auto c = stochastic::fractional_convolution_path(noise, 0.5, 0.01, 100, seed + 1);
    auto prob = nonlinear_problem("pme3", 0.6, 12, 0.25);
    stochastic::NoiseSpec field;
    field.gamma = 0.8;
    field.B = {Eigen::MatrixXd::Identity(12, 12) * 0.2};
    stepper::SolverConfig cfg;
    cfg.dt = 1.0 / 64;
    const bool same_spde =
        stochastic::solve_spde(prob, field, cfg, seed).states == stochastic::solve_spde(prob, field, cfg, seed).states;
    const bool ok = a == b && !(a == c) && same_spde;
    return make_result("stochastic", "seed_determinism", ok, ok ? 1.0 : -1.0,
                       "same seed gives identical paths and SPDE trajectories; a different seed differs");
}

// ---- yosida ----

InvariantResult check_lambda_dissipative(std::uint64_t seed) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double beta : {0.2, 0.5, 0.8, 1.0}) {
        const auto L = abstractcore::build_discrete_lambda(beta, 0.01, 64);
        worst = std::max(worst, abstractcore::max_dissipativity(L.column(), 2, 1000, seed));
    }
    return at_most("yosida", "lambda_dissipative", worst, 1e-12, "max <Lambda u, u> / |u|^2");
}

InvariantResult check_yosida_dissipative(std::uint64_t seed) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double beta : {0.3, 0.7}) {
        const auto L = abstractcore::build_discrete_lambda(beta, 1.0 / 32, 32);
        for (double alpha : {1.0, 1e2, 1e4})
            worst = std::max(worst, abstractcore::max_dissipativity(abstractcore::yosida_column(L, alpha), 4, 200, seed));
    }
    return at_most("yosida", "yosida_dissipative", worst, 1e-12, "max <Lambda_alpha u, u> / |u|^2");
}

InvariantResult check_resolvent_contraction() {
    double worst = 0.0;
    for (double beta : {0.3, 0.7, 1.0}) {
        const auto L = abstractcore::build_discrete_lambda(beta, 1.0 / 32, 32);
        for (double alpha : {1e-2, 1.0, 1e2, 1e4}) worst = std::max(worst, abstractcore::resolvent_contraction(L, alpha));
    }
    return at_most("yosida", "resolvent_contraction", worst, 1.0 + 1e-12, "max ||alpha V_alpha|| by power iteration");
}

InvariantResult check_symbol_linear(double beta) {
    const std::vector<double> omegas{0.5, 1.0, 2.0, 4.0};
    const double e1 = abstractcore::symbol_error(beta, 1e-1, omegas);
    const double e2 = abstractcore::symbol_error(beta, 1e-2, omegas);
    const double e3 = abstractcore::symbol_error(beta, 1e-3, omegas);
    const double s1 = std::log10(e1 / e2);
    const double s2 = std::log10(e2 / e3);
    const double margin = 0.1 - std::max(std::fabs(s1 - 1.0), std::fabs(s2 - 1.0));
    std::ostringstream name;
    name << "symbol_linear_in_dt_beta_" << beta;
    return make_result("yosida", name.str(), margin >= 0.0 && e1 > e2 && e2 > e3, margin,
                       fmt("deviations %.3g %.3g %.3g", e1, e2, e3) + fmt(", slopes %.4f %.4f", s1, s2));
}

InvariantResult check_yosida_porous_medium(std::size_t threads) {
    const TripleSpec triple{Grid1D{16, 1.0}, TripleKind::PorousMedium, 3.0, 1.0};
    const auto op = make_operator(OperatorSpec{PorousMediumSpec{}, std::nullopt}, triple);
    const double dt = 1.0 / 32;
    const auto L = abstractcore::build_discrete_lambda(0.5, dt, 32);
    const auto f = yosida_forcing(triple.grid, 32, dt);
    const std::vector<double> alphas{1.0, 10.0, 100.0, 1e3, 1e4};
    stepper::SolverConfig cfg;
    cfg.nonlinear_tol = 1e-12;
    const auto study = abstractcore::yosida_convergence_study(*op, L, f, alphas, cfg, threads);
    const double final_rel = study.errors.back() / study.norm_reference;
    double residual = 0.0;
    for (const auto& s : study.states) residual = std::max(residual, s.residual);
    const bool ok = study.bounded && study.decreasing_from == 0 && final_rel <= 1e-3 && residual <= 1e-8;
    std::ostringstream d;
    d << "sup ||u_a|| " << study.sup_norm_u << " <= " << study.apriori_bound_u << ", sup ||A u_a|| "
      << study.sup_norm_Au << " <= " << study.apriori_bound_Au << ", errors";
    for (double e : study.errors) d << ' ' << e / study.norm_reference;
    d << " (relative), resolvent constant " << study.resolvent_constant << ", max residual " << residual;
    return make_result("yosida", "yosida_porous_medium_32x16", ok, 1e-3 - final_rel, d.str());
}

InvariantResult check_yosida_linear_rate() {
    const TripleSpec triple{Grid1D{16, 1.0}, TripleKind::PLaplace, 2.0, 1.0};
    const auto op = make_operator(OperatorSpec{LinearSpec{1.0}, std::nullopt}, triple);
    const double dt = 1.0 / 32;
    const auto L = abstractcore::build_discrete_lambda(0.5, dt, 32);
    const auto f = yosida_forcing(triple.grid, 32, dt);
    const std::vector<double> alphas{1.0, 10.0, 100.0, 1e3, 1e4};
    const auto study = abstractcore::yosida_convergence_study(*op, L, f, alphas);
    const double last = std::log10(study.errors[3] / study.errors[4]);
    const double margin = 0.05 - std::fabs(last - 1.0);
    return make_result("yosida", "yosida_linear_rate_one_over_alpha", margin >= 0.0 && study.bounded, margin,
                       fmt("last-decade slope %.4f, fitted rate %.4f", last, study.rate));
}

// ---- driver ----

SuiteReport run_suite(Suite suite, const VerifyOptions& options) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    SuiteReport report;
    const std::uint64_t seed = options.seed;
    auto run = [&](auto&& check, std::string_view group) {
        const auto t0 = Clock::now();
        InvariantResult r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = make_result(std::string(group), "unexpected_exception", false, -1.0, e.what());
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        report.results.push_back(std::move(r));
    };
    const bool all = suite == Suite::All;

    if (all || suite == Suite::Kernels) {
        run([&] { return check_gl_closed_form(options); }, "kernels");
        run([&] { return check_gl_signs(options); }, "kernels");
        run([] { return check_l1_coefficients(); }, "kernels");
        run([] { return check_kernel_semigroup(0.5, 0.5); }, "kernels");
        run([] { return check_kernel_semigroup(0.3, 0.9); }, "kernels");
        run([] { return check_half_half_analytic(); }, "kernels");
        run([] { return check_left_inverse(); }, "kernels");
        run([&] { return check_l1_square_inequality(seed + 1); }, "kernels");
        run([] { return check_mittag_leffler_monotone(); }, "kernels");
        run([&] { return check_subordinator(0.5, 1.0, 1.0, 100000, seed + 2); }, "kernels");
        run([&] { return check_subordinator(0.7, 0.5, 2.0, 100000, seed + 3); }, "kernels");
    }
    if (all || suite == Suite::Operators) {
        for (const char* kind : {"pme3", "pme4", "pme_fractional", "plaplace3", "plaplace3_perturbed"})
            run([&] { return check_structural(kind, 1000, seed + 10, options.threads); }, "operators");
        run([&] { return check_dual_pairing(seed + 11); }, "operators");
        run([&] { return check_zero_gap(seed + 12); }, "operators");
    }
    if (all || suite == Suite::Stepper) {
        for (double beta : {0.3, 0.5, 0.8}) run([&] { return check_mittag_leffler_oracle(beta); }, "stepper");
        run([] { return check_backward_euler(); }, "stepper");
        for (const char* kind : {"pme3", "pme4", "plaplace3"})
            for (double beta : {0.4, 0.7}) run([&] { return check_stability(kind, beta, 20, seed + 20); }, "stepper");
        run([&] { return check_resolvent_nonexpansive(seed + 21); }, "stepper");
        run([] { return check_integral_equation_rate(); }, "stepper");
    }
    if (all || suite == Suite::Stochastic) {
        run([] { return check_noise_gate(); }, "stochastic");
        run([] { return check_gate_soundness(); }, "stochastic");
        for (auto [beta, gamma] : {std::pair{0.5, 0.25}, std::pair{0.5, 0.5}, std::pair{0.8, 1.0}})
            run([&] { return check_variance_law(beta, gamma, 10000, seed + 30); }, "stochastic");
        run([&] { return check_centered(10000, seed + 31); }, "stochastic");
        run([&] { return check_path_determinism(seed + 32); }, "stochastic");
    }
    if (all || suite == Suite::Yosida) {
        run([&] { return check_lambda_dissipative(seed + 40); }, "yosida");
        run([&] { return check_yosida_dissipative(seed + 41); }, "yosida");
        run([] { return check_resolvent_contraction(); }, "yosida");
        for (double beta : {0.5, 0.8}) run([&] { return check_symbol_linear(beta); }, "yosida");
        run([&] { return check_yosida_porous_medium(options.threads); }, "yosida");
        run([] { return check_yosida_linear_rate(); }, "yosida");
    }
    report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

void write_report(std::ostream& out, const SuiteReport& report) {
    char buf[64];
    for (const auto& r : report.results) {
        std::snprintf(buf, sizeof buf, "%-4s ", r.passed ? "PASS" : "FAIL");
        out << buf << r.suite << '/' << r.name;
        std::snprintf(buf, sizeof buf, "  margin=%.6g  time=%.2fs", r.margin, r.seconds);
        out << buf << "  " << r.detail << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.2f", report.seconds);
    out << report.results.size() - report.failures() << '/' << report.results.size() << " invariants passed in "
        << buf << "s\n";
}

} // namespace fracmono::verify
