#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracmono/stepper/resolvent.hpp"
#include "fracmono/stepper/solver.hpp"
#include "fracmono/stochastic/noise.hpp"

namespace fracmono::cli {

/// Unreadable, malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Equation { PorousMedium, PLaplace, Linear };

std::string_view to_string(Equation e);

struct InitialCondition {
    /// sine_mode, bump, constant or file.
    std::string profile = "sine_mode";
    int k = 1;
    double amplitude = 1.0;
    double center = 0.5;
    double width = 0.25;
    double value = 0.0;
    /// Whitespace or comma separated nodal values, relative to the config file.
    std::filesystem::path path;
};

struct NoiseConfig {
    std::size_t modes = 1;
    /// Exactly one of diagonal (modes entries, B(i, i)) or matrix (n rows of modes entries).
    std::vector<double> diagonal;
    std::vector<std::vector<double>> matrix;
    stochastic::NoiseRegularity regularity = stochastic::NoiseRegularity::BoundedInTime;
};

struct RunConfig {
    Equation equation = Equation::PorousMedium;
    std::size_t n = 64;
    double length = 1.0;
    double p = 2.0;
    double alpha_frac = 1.0;
    double lambda = 1.0;
    bool zero_order = false;

    double beta = 0.5;
    std::optional<double> gamma;
    double T = 1.0;
    double dt = 1e-2;
    kernels::MemoryScheme scheme = kernels::MemoryScheme::L1;
    double nonlinear_tol = 1e-10;
    std::size_t max_newton = 50;

    InitialCondition initial;
    std::optional<NoiseConfig> noise;
    std::size_t monte_carlo_paths = 0;
    std::uint64_t seed = 0;

    std::filesystem::path output_directory;
    bool binary_dump = false;

    /// Directory of the config file; relative paths resolve against it.
    std::filesystem::path base_dir;
};

/// Strict parse: unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Reads, parses and validates a JSON config file.
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks: p >= 2, dt > 0, T/dt integral, beta in (0, 1], noise
/// gate and shapes, initial profile. Throws ConfigError.
void validate(const RunConfig& config);

/// Fully resolved config, accepted back by parse_config.
nlohmann::json to_json(const RunConfig& config);

std::vector<double> initial_state(const RunConfig& config);
stepper::ProblemSpec make_problem(const RunConfig& config);
stepper::SolverConfig make_solver_config(const RunConfig& config);
stochastic::NoiseSpec make_noise(const RunConfig& config);

/// Sets a sweep axis: beta, gamma, dt, p or alpha_frac. Throws ConfigError.
void set_axis(RunConfig& config, std::string_view axis, double value);

} // namespace fracmono::cli
