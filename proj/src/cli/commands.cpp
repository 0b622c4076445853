#include "fracmono/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fracmono/errors.hpp"
#include "fracmono/operators/triple.hpp"
#include "fracmono/stepper/analysis.hpp"
#include "fracmono/stepper/export.hpp"
#include "fracmono/stochastic/spde.hpp"
#include "fracmono/verify/suites.hpp"

#ifndef FRACMONO_VERSION
#define FRACMONO_VERSION "unknown"
#endif

namespace fracmono::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct RunOutcome {
    int code = kExitOk;
    std::string message;
    std::size_t steps = 0;
    double norm_H = kNaN;
    double norm_V = kNaN;
    double decay_exponent = kNaN;
    double decay_rate = kNaN;
};

std::vector<std::string> trajectory_comments(const RunConfig& c) {
    std::vector<std::string> lines;
    lines.push_back("fracmono " + std::string(version()));
    lines.push_back("equation=" + std::string(to_string(c.equation)) + " p=" + num(c.p) + " n=" + std::to_string(c.n) +
                    " length=" + num(c.length));
    lines.push_back("beta=" + num(c.beta) + " T=" + num(c.T) + " dt=" + num(c.dt) +
                    " scheme=" + (c.scheme == kernels::MemoryScheme::L1 ? "l1" : "gl"));
    if (c.noise)
        lines.push_back("gamma=" + num(*c.gamma) + " modes=" + std::to_string(c.noise->modes) +
                        " regularity=" + std::string(stochastic::to_string(c.noise->regularity)) +
                        " seed=" + std::to_string(c.seed));
    return lines;
}

/// Resolved config for the run directory: the initial file is copied next to it.
json artifact_config(const RunConfig& c, const fs::path& dir) {
    RunConfig copy = c;
    if (c.initial.profile == "file") {
        const auto src = c.initial.path.is_absolute() || c.base_dir.empty() ? c.initial.path : c.base_dir / c.initial.path;
        fs::copy_file(src, dir / "initial_state.txt", fs::copy_options::overwrite_existing);
        copy.initial.path = "initial_state.txt";
    }
    copy.output_directory.clear();
    auto j = to_json(copy);
    j["output"].erase("directory");
    return j;
}

RunOutcome execute(const RunConfig& c, const fs::path& dir, std::size_t threads) {
    RunOutcome outcome;
    stepper::ProblemSpec problem;
    stepper::SolverConfig cfg;
    try {
        validate(c);
        problem = make_problem(c);
        cfg = make_solver_config(c);
        problem.validate();
        cfg.validate();
        problem.triple.validate();
    } catch (const ConfigError& e) {
        return {.code = kExitValidation, .message = e.what()};
    } catch (const std::invalid_argument& e) {
        return {.code = kExitValidation, .message = e.what()};
    }

    const auto t0 = std::chrono::steady_clock::now();
    stepper::TrajectoryRecord traj;
    std::optional<stochastic::PathStatistics> stats;
    json failure;
    try {
        if (c.noise) {
            const auto noise = make_noise(c);
            traj = stochastic::solve_spde(problem, noise, cfg, c.seed);
            if (c.monte_carlo_paths > 0) {
                stochastic::MonteCarloOptions mc;
                mc.threads = static_cast<unsigned>(std::max<std::size_t>(1, threads));
                stats = stochastic::monte_carlo_moments(problem, noise, cfg, c.monte_carlo_paths, c.seed, mc);
                if (stats->n_ok < 2) {
                    outcome.code = kExitSolver;
                    outcome.message = "Monte Carlo: only " + std::to_string(stats->n_ok) + " of " +
                                      std::to_string(stats->n_paths) + " paths converged";
                }
            }
        } else {
            traj = stepper::solve_deterministic(problem, cfg);
        }
    } catch (const NonConvergence& e) {
        outcome.code = kExitSolver;
        outcome.message = std::string("solver failure: ") + e.what();
        failure = {{"message", e.what()}, {"last_residual", e.last_residual()}, {"iterations", e.iterations()}};
        if (e.node) failure["node"] = *e.node;
        if (e.seed) failure["seed"] = *e.seed;
    } catch (const std::invalid_argument& e) {
        return {.code = kExitValidation, .message = e.what()};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(dir);
    json meta;
    meta["fracmono_version"] = std::string(version());
    meta["created_utc"] = utc_timestamp();
    meta["seed"] = c.seed;
    meta["wall_seconds"] = wall;
    meta["config"] = artifact_config(c, dir);
    write_json(dir / "config.json", meta["config"]);
    json artifacts = json::array({"config.json", "metadata.json"});

    if (outcome.code == kExitOk || stats) {
        if (!traj.times.empty()) {
            outcome.steps = traj.steps();
            outcome.norm_H = traj.diagnostics.back().norm_H;
            outcome.norm_V = traj.diagnostics.back().norm_V;
            try {
                const auto decay = stepper::estimate_decay_exponent(traj, 0.5);
                outcome.decay_exponent = decay.exponent;
                outcome.decay_rate = decay.exponential_rate;
            } catch (const std::domain_error&) {
            }
            std::ofstream csv(dir / "trajectory.csv");
            stepper::write_trajectory_csv(csv, traj, trajectory_comments(c));
            artifacts.push_back("trajectory.csv");
            if (c.binary_dump) {
                stepper::write_state_dump(dir / "states.bin", traj);
                artifacts.push_back("states.bin");
            }
            meta["steps"] = outcome.steps;
            meta["final_norm_H"] = outcome.norm_H;
            meta["final_norm_V"] = outcome.norm_V;
        }
        if (stats) {
            std::ofstream csv(dir / "statistics.csv");
            stochastic::write_statistics_csv(csv, *stats);
            artifacts.push_back("statistics.csv");
            meta["monte_carlo"] = {{"paths", stats->n_paths},
                                   {"ok", stats->n_ok},
                                   {"failed", stats->n_fail},
                                   {"failed_seeds", stats->failed_seeds}};
        }
    }
    meta["status"] = outcome.code == kExitOk ? "ok" : "solver_failure";
    if (!failure.is_null()) meta["failure"] = failure;
    meta["artifacts"] = artifacts;
    write_json(dir / "metadata.json", meta);
    return outcome;
}

RunConfig load_with_overrides(const fs::path& config_path, const CommandOptions& options) {
    auto c = load_config(config_path);
    if (options.seed) c.seed = *options.seed;
    return c;
}

} // namespace

std::string_view version() { return FRACMONO_VERSION; }

fs::path output_directory(const RunConfig& c, const fs::path& config_path, const CommandOptions& options) {
    if (options.out) return *options.out;
    if (!c.output_directory.empty())
        return c.output_directory.is_absolute() || c.base_dir.empty() ? c.output_directory
                                                                      : c.base_dir / c.output_directory;
    const fs::path stem = config_path.stem();
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') return fs::path(root) / stem;
    return fs::path("fracmono_output") / stem;
}

int run_command(const fs::path& config_path, const CommandOptions& options, std::ostream& out, std::ostream& err) {
    RunConfig c;
    try {
        c = load_with_overrides(config_path, options);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    const auto dir = output_directory(c, config_path, options);
    RunOutcome r;
    try {
        r = execute(c, dir, options.threads);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    if (r.code != kExitOk) {
        err << "error: " << r.message << '\n';
        return r.code;
    }
    out << "run ok: " << r.steps << " steps, final ||u||_H = " << num(r.norm_H) << ", artifacts in " << dir.string()
        << '\n';
    return kExitOk;
}

int verify_command(std::string_view suite, const CommandOptions& options, std::ostream& out, std::ostream& err) {
    verify::Suite s;
    try {
        s = verify::suite_from_string(suite);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    verify::VerifyOptions vo;
    if (options.seed) vo.seed = *options.seed;
    vo.threads = std::max<std::size_t>(1, options.threads);
    const auto report = verify::run_suite(s, vo);
    verify::write_report(out, report);
    if (options.out) {
        fs::create_directories(*options.out);
        std::ofstream file(*options.out / ("verify_" + std::string(suite) + ".txt"));
        verify::write_report(file, report);
    }
    return report.passed() ? kExitOk : kExitFailure;
}

int sweep_command(const fs::path& config_path, std::string_view axis, const std::vector<double>& values,
                  const CommandOptions& options, std::ostream& out, std::ostream& err) {
    if (values.empty()) {
        err << "error: sweep needs at least one value\n";
        return kExitValidation;
    }
    RunConfig base;
    try {
        base = load_with_overrides(config_path, options);
        RunConfig probe = base;
        set_axis(probe, axis, values.front());
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    const auto root = output_directory(base, config_path, options);

    std::vector<RunOutcome> outcomes(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            RunConfig c = base;
            c.output_directory.clear();
            set_axis(c, axis, values[i]);
            try {
                outcomes[i] = execute(c, root / (std::string(axis) + "_" + num(values[i])), 1);
            } catch (const std::exception& e) {
                outcomes[i] = {.code = kExitFailure, .message = e.what()};
            }
        }
    };
    {
        const std::size_t n_workers = std::clamp<std::size_t>(options.threads, 1, values.size());
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
        worker();
    }

    double order = kNaN;
    std::string order_note;
    if (axis == "dt" && !base.noise) {
        std::vector<double> dts;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (outcomes[i].code == kExitOk) dts.push_back(values[i]);
        std::sort(dts.begin(), dts.end(), std::greater<>());
        dts.erase(std::unique(dts.begin(), dts.end()), dts.end());
        if (dts.size() >= 3) {
            try {
                const auto est = stepper::estimate_order(make_problem(base), make_solver_config(base), dts);
                order = est.order;
                order_note = est.monotone ? "" : " (errors not monotone)";
            } catch (const std::exception& e) {
                order_note = std::string(" (") + e.what() + ")";
            }
        }
    }

    fs::create_directories(root);
    std::ofstream csv(root / "summary.csv");
    csv << "# fracmono " << version() << '\n';
    csv << "# axis=" << axis << " seed=" << base.seed << '\n';
    if (axis == "dt") csv << "# observed_order=" << num(order) << order_note << '\n';
    csv << "value,status,steps,final_norm_H,final_norm_V,decay_exponent,decay_rate_exponential,observed_order\n";
    int code = kExitOk;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& r = outcomes[i];
        const char* status = r.code == kExitOk           ? "ok"
                             : r.code == kExitValidation ? "validation_error"
                             : r.code == kExitSolver     ? "solver_failure"
                                                         : "error";
        csv << num(values[i]) << ',' << status << ',' << r.steps << ',' << num(r.norm_H) << ',' << num(r.norm_V) << ','
            << num(r.decay_exponent) << ',' << num(r.decay_rate) << ',' << num(order) << '\n';
        if (r.code != kExitOk) {
            err << "error: " << axis << "=" << num(values[i]) << ": " << r.message << '\n';
            if (code == kExitOk || r.code == kExitValidation) code = r.code;
        }
    }
    out << "sweep over " << axis << ": " << values.size() << " runs, summary in " << (root / "summary.csv").string();
    if (axis == "dt") out << ", observed order " << num(order);
    out << '\n';
    return code;
}

} // namespace fracmono::cli
