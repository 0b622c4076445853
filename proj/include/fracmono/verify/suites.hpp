#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fracmono::verify {

enum class Suite { Kernels, Operators, Stepper, Stochastic, Yosida, All };

std::string_view to_string(Suite suite);
/// Throws std::invalid_argument for an unknown name.
Suite suite_from_string(std::string_view name);

/// One checked invariant. margin >= 0 means the invariant holds; it is the
/// distance to the threshold in the units of the check.
struct InvariantResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double margin = 0.0;
    double seconds = 0.0;
    std::string detail;
};

struct SuiteReport {
    std::vector<InvariantResult> results;
    double seconds = 0.0;
    [[nodiscard]] bool passed() const;
    [[nodiscard]] std::size_t failures() const;
};

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    std::size_t threads = 1;
    /// Applied to freshly computed GL weights inside the kernel checks; used
    /// to inject faults in tests.
    std::function<void(std::vector<double>&)> gl_fault;
};

SuiteReport run_suite(Suite suite, const VerifyOptions& options = {});

/// One line per invariant: status, suite/name, margin, time, detail.
void write_report(std::ostream& out, const SuiteReport& report);

// Individual checks, shared with the acceptance driver.

/// GL recurrence vs Gamma-ratio closed form, beta in {0.1..0.9}, k <= 1000, 1e-13 relative.
InvariantResult check_gl_closed_form(const VerifyOptions& options = {});
InvariantResult check_gl_signs(const VerifyOptions& options = {});
InvariantResult check_l1_coefficients();
/// Quadrature of g_a * g_b against g_{a+b} on t in [1/4, 1] at n = 64, 256, 1024:
/// errors must fall with observed order >= 0.8 min(a, b).
InvariantResult check_kernel_semigroup(double a, double b);
InvariantResult check_half_half_analytic();
/// D^beta(I^beta f) -> f on [1/2, 1] for f = sin 3t + t^2, both schemes.
InvariantResult check_left_inverse();
InvariantResult check_l1_square_inequality(std::uint64_t seed, std::size_t sequences = 1000);
InvariantResult check_mittag_leffler_monotone();
/// |mean exp(-lambda S_t) - exp(-t lambda^beta)| <= 3 SE over `draws` samples, all draws > 0.
InvariantResult check_subordinator(double beta, double lambda, double t, std::size_t draws, std::uint64_t seed);

/// kind: pme3, pme4, pme_fractional, plaplace3, plaplace3_perturbed.
InvariantResult check_structural(std::string_view kind, std::size_t trials, std::uint64_t seed, std::size_t threads);
InvariantResult check_dual_pairing(std::uint64_t seed);
InvariantResult check_zero_gap(std::uint64_t seed);

/// Linear relaxation u' = -u of order beta, L1, dt = 2^-11: relative error at T = 1 <= 1e-2
/// against a 100-digit Mittag-Leffler series.
InvariantResult check_mittag_leffler_oracle(double beta);
/// beta = 1 GL marching vs backward Euler on a 1000-step linear and porous-medium run, 1e-12.
InvariantResult check_backward_euler();
/// kind: pme3, pme4, plaplace3. max_n ||u1_n - u2_n||_H <= (1 + 1e-10) ||x1 - x2||_H.
InvariantResult check_stability(std::string_view kind, double beta, std::size_t pairs, std::uint64_t seed);
InvariantResult check_resolvent_nonexpansive(std::uint64_t seed);
InvariantResult check_integral_equation_rate();

InvariantResult check_noise_gate();
InvariantResult check_gate_soundness();
/// Empirical Var F(1) with N = 256 steps against the analytic value; tolerance
/// `k_se` standard errors of the variance estimate.
InvariantResult check_variance_law(double beta, double gamma, std::size_t paths, std::uint64_t seed, double k_se = 4.0);
InvariantResult check_centered(std::size_t paths, std::uint64_t seed);
InvariantResult check_path_determinism(std::uint64_t seed);

InvariantResult check_lambda_dissipative(std::uint64_t seed);
InvariantResult check_yosida_dissipative(std::uint64_t seed);
InvariantResult check_resolvent_contraction();
/// Discrete GL symbol deviation over omega in {0.5, 1, 2, 4} and dt in {1e-1, 1e-2, 1e-3}:
/// strictly decreasing with per-decade slope within 0.1 of 1.
InvariantResult check_symbol_linear(double beta);
/// Porous medium p = 3 on a 32 x 16 space-time grid, alpha in {1, ..., 1e4}:
/// a-priori bounds hold, errors decrease, final error <= 1e-3 ||u*||.
InvariantResult check_yosida_porous_medium(std::size_t threads);
/// Linear A: last-decade error ratio within 0.05 decades of 1/alpha.
InvariantResult check_yosida_linear_rate();

} // namespace fracmono::verify
