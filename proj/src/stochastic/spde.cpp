#include "fracmono/stochastic/spde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fracmono/errors.hpp"

namespace fracmono::stochastic {

ShiftedOperator::ShiftedOperator(const operators::MonotoneOperator& base, const NodalSeries& shift, double dt)
    : MonotoneOperator(base.triple()), base_(base), shift_(shift), dt_(dt) {
    if (shift.n_dof() != base.dim()) throw std::invalid_argument("ShiftedOperator: path does not match the grid");
}

std::vector<double> ShiftedOperator::shifted(double t, std::span<const double> u) const {
    const auto k = static_cast<std::size_t>(std::llround(t / dt_));
    if (k >= shift_.n_nodes()) throw std::out_of_range("ShiftedOperator: time beyond the sampled path");
    const auto f = shift_.row(k);
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + f[i];
    return w;
}

void ShiftedOperator::apply(double t, std::span<const double> u, std::span<double> out) const {
    base_.apply(t, shifted(t, u), out);
}

double ShiftedOperator::potential(double t, std::span<const double> u) const {
    return base_.potential(t, shifted(t, u));
}

operators::Jacobian ShiftedOperator::jacobian(double t, std::span<const double> u) const {
    return base_.jacobian(t, shifted(t, u));
}

double ShiftedOperator::inner_H(std::span<const double> u, std::span<const double> v) const {
    return base_.inner_H(u, v);
}

double ShiftedOperator::norm_V(std::span<const double> v) const { return base_.norm_V(v); }

double ShiftedOperator::norm_Vstar(std::span<const double> w) const { return base_.norm_Vstar(w); }

stepper::TrajectoryRecord solve_spde_with_path(const operators::MonotoneOperator& op,
                                               const stepper::ProblemSpec& problem, const NodalSeries& path,
                                               const stepper::SolverConfig& cfg) {
    const std::size_t n_steps = stepper::step_count(problem.T, cfg.dt);
    if (path.n_nodes() != n_steps + 1) throw std::invalid_argument("solve_spde: path length does not match T/dt");
    const ShiftedOperator shifted(op, path, cfg.dt);
    auto rec = stepper::march(shifted, problem.beta, problem.T, problem.x0, problem.forcing, cfg);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        auto x = rec.states.row(n);
        const auto f = path.row(n);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += f[i];
        rec.diagnostics[n].norm_H = op.norm_H(x);
        rec.diagnostics[n].norm_V = op.norm_V(x);
    }
    return rec;
}

stepper::TrajectoryRecord solve_spde(const stepper::ProblemSpec& problem, const NoiseSpec& noise,
                                     const stepper::SolverConfig& cfg, std::uint64_t seed) {
    problem.validate();
    cfg.validate();
    if (const auto gate = validate_noise(problem.beta, noise); !gate) throw std::invalid_argument(gate.reason);
    if (noise.dof() != problem.x0.size()) throw std::invalid_argument("noise: B rows do not match the grid");
    const std::size_t n_steps = stepper::step_count(problem.T, cfg.dt);
    const auto path = fractional_convolution_path(noise, problem.beta, cfg.dt, n_steps, seed);
    const auto op = operators::make_operator(problem.op, problem.triple);
    try {
        return solve_spde_with_path(*op, problem, path, cfg);
    } catch (NonConvergence& e) {
        e.seed = seed;
        throw;
    }
}

PathStatistics monte_carlo_moments(const stepper::ProblemSpec& problem, const NoiseSpec& noise,
                                   const stepper::SolverConfig& cfg, std::size_t n_paths, std::uint64_t base_seed,
                                   const MonteCarloOptions& options) {
    if (n_paths < 2) throw std::invalid_argument("monte_carlo_moments: n_paths must be at least 2");
    problem.validate();
    cfg.validate();
    if (const auto gate = validate_noise(problem.beta, noise); !gate) throw std::invalid_argument(gate.reason);
    const std::size_t dof = problem.x0.size();
    if (noise.dof() != dof) throw std::invalid_argument("noise: B rows do not match the grid");
    std::vector<double> phi = options.functional.empty() ? std::vector<double>(dof, 1.0) : options.functional;
    if (phi.size() != dof) throw std::invalid_argument("monte_carlo_moments: functional does not match the grid");

    const std::size_t n_steps = stepper::step_count(problem.T, cfg.dt);
    const std::size_t nodes = n_steps + 1;
    const auto op = operators::make_operator(problem.op, problem.triple);

    // Per path: H-norm and functional per node; per block of paths: state sums.
    constexpr std::size_t kBlock = 64;
    const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> norms(n_paths);
    std::vector<std::vector<double>> values(n_paths);
    std::vector<char> ok(n_paths, 0);
    std::vector<NodalSeries> block_sums(n_blocks);

    auto run_block = [&](std::size_t b) {
        NodalSeries sum(nodes, dof);
        for (std::size_t i = b * kBlock; i < std::min(n_paths, (b + 1) * kBlock); ++i) {
            const std::uint64_t seed = base_seed + i;
            auto p = problem;
            if (options.initial_state) p.x0 = options.initial_state(seed);
            try {
                const auto rec = solve_spde(p, noise, cfg, seed);
                norms[i].resize(nodes);
                values[i].resize(nodes);
                for (std::size_t n = 0; n < nodes; ++n) {
                    const auto x = rec.states.row(n);
                    norms[i][n] = rec.diagnostics[n].norm_H;
                    double v = 0.0;
                    for (std::size_t k = 0; k < dof; ++k) v += phi[k] * x[k];
                    values[i][n] = v;
                    auto s = sum.row(n);
                    for (std::size_t k = 0; k < dof; ++k) s[k] += x[k];
                }
                ok[i] = 1;
            } catch (const NonConvergence&) {
                ok[i] = 0;
            }
        }
        block_sums[b] = std::move(sum);
    };

    const std::size_t n_threads = std::clamp<std::size_t>(options.threads, 1, n_blocks);
    if (n_threads == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
            });
    }

    PathStatistics stats;
    stats.n_paths = n_paths;
    stats.base_seed = base_seed;
    stats.times.resize(nodes);
    for (std::size_t n = 0; n < nodes; ++n) stats.times[n] = static_cast<double>(n) * cfg.dt;
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (ok[i])
            ++stats.n_ok;
        else
            stats.failed_seeds.push_back(base_seed + i);
    }
    stats.n_fail = n_paths - stats.n_ok;
    stats.mean_state = NodalSeries(nodes, dof);
    stats.mean_normH.assign(nodes, 0.0);
    stats.mean_functional.assign(nodes, 0.0);
    stats.var_functional.assign(nodes, 0.0);
    stats.stderr_functional.assign(nodes, 0.0);
    if (stats.n_ok == 0) return stats;

    const auto count = static_cast<double>(stats.n_ok);
    for (const auto& s : block_sums)
        for (std::size_t k = 0; k < s.flat().size(); ++k) stats.mean_state.flat()[k] += s.flat()[k];
    for (auto& x : stats.mean_state.flat()) x /= count;
    for (std::size_t n = 0; n < nodes; ++n) {
        double sn = 0.0;
        double sv = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            if (!ok[i]) continue;
            sn += norms[i][n];
            sv += values[i][n];
        }
        const double mean = sv / count;
        double ss = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i)
            if (ok[i]) ss += (values[i][n] - mean) * (values[i][n] - mean);
        stats.mean_normH[n] = sn / count;
        stats.mean_functional[n] = mean;
        stats.var_functional[n] = stats.n_ok > 1 ? ss / (count - 1.0) : 0.0;
        stats.stderr_functional[n] = std::sqrt(stats.var_functional[n] / count);
    }
    return stats;
}

void write_statistics_csv(std::ostream& out, const PathStatistics& stats) {
    char buf[128];
    out << "# seed=" << stats.base_seed << " n_paths=" << stats.n_paths << '\n';
    out << "t,mean_normH,var_functional,stderr,n_ok,n_fail\n";
    for (std::size_t n = 0; n < stats.times.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", stats.times[n], stats.mean_normH[n],
                      stats.var_functional[n], stats.stderr_functional[n]);
        out << buf << stats.n_ok << ',' << stats.n_fail << '\n';
    }
}

} // namespace fracmono::stochastic
