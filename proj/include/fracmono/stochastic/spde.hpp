#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "fracmono/series.hpp"
#include "fracmono/stepper/solver.hpp"
#include "fracmono/stochastic/noise.hpp"

namespace fracmono::stochastic {

/// A(t, u + F(t)) for a path F sampled on the solver grid.
class ShiftedOperator final : public operators::MonotoneOperator {
public:
    ShiftedOperator(const operators::MonotoneOperator& base, const NodalSeries& shift, double dt);

    void apply(double t, std::span<const double> u, std::span<double> out) const override;
    [[nodiscard]] double potential(double t, std::span<const double> u) const override;
    [[nodiscard]] operators::Jacobian jacobian(double t, std::span<const double> u) const override;
    [[nodiscard]] operators::StructuralConstants constants() const override { return base_.constants(); }
    [[nodiscard]] std::string name() const override { return base_.name() + "_shifted"; }
    [[nodiscard]] double inner_H(std::span<const double> u, std::span<const double> v) const override;
    [[nodiscard]] double norm_V(std::span<const double> v) const override;
    [[nodiscard]] double norm_Vstar(std::span<const double> w) const override;

private:
    const operators::MonotoneOperator& base_;
    const NodalSeries& shift_;
    double dt_;

    [[nodiscard]] std::vector<double> shifted(double t, std::span<const double> u) const;
};

/// One path of D^beta (X - x0) + A(t, X) = D^gamma int B dW: with
/// u = X - F it solves D^beta (u - x0) + A(t, u + F) = f and returns
/// X_n = u_n + F(t_n). Diagnostics are recomputed for X. NonConvergence
/// carries the seed.
stepper::TrajectoryRecord solve_spde(const stepper::ProblemSpec& problem, const NoiseSpec& noise,
                                     const stepper::SolverConfig& cfg, std::uint64_t seed);

/// Same solve on a given path F (rows t_0..t_N).
stepper::TrajectoryRecord solve_spde_with_path(const operators::MonotoneOperator& op,
                                               const stepper::ProblemSpec& problem, const NodalSeries& path,
                                               const stepper::SolverConfig& cfg);

struct MonteCarloOptions {
    /// Weights phi of the functional sum_i phi_i X_i; empty means all ones.
    std::vector<double> functional;
    unsigned threads = 1;
    /// Optional seed-indexed initial state, replacing problem.x0 per path.
    std::function<std::vector<double>(std::uint64_t seed)> initial_state;
};

struct PathStatistics {
    std::size_t n_paths = 0;
    std::size_t n_ok = 0;
    std::size_t n_fail = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> times;
    NodalSeries mean_state;
    std::vector<double> mean_normH;
    std::vector<double> mean_functional;
    std::vector<double> var_functional;
    /// sample std of the functional / sqrt(n_ok)
    std::vector<double> stderr_functional;
    std::vector<std::uint64_t> failed_seeds;
};

/// Runs paths with seeds base_seed + i and aggregates them in index order.
/// Throws std::invalid_argument when n_paths < 2.
PathStatistics monte_carlo_moments(const stepper::ProblemSpec& problem, const NoiseSpec& noise,
                                   const stepper::SolverConfig& cfg, std::size_t n_paths, std::uint64_t base_seed,
                                   const MonteCarloOptions& options = {});

/// Columns t,mean_normH,var_functional,stderr,n_ok,n_fail after a
/// "# seed=<base_seed>" comment line.
void write_statistics_csv(std::ostream& out, const PathStatistics& stats);

} // namespace fracmono::stochastic
