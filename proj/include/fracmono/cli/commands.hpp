#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "fracmono/cli/config.hpp"

namespace fracmono::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "FRACMONO_OUTPUT_ROOT";

struct CommandOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::size_t threads = 1;
};

std::string_view version();

/// --out, else output.directory of the config, else <$FRACMONO_OUTPUT_ROOT>/<config stem>,
/// else fracmono_output/<config stem>.
std::filesystem::path output_directory(const RunConfig& config, const std::filesystem::path& config_path,
                                       const CommandOptions& options);

/// Writes trajectory.csv, metadata.json, config.json and, on request,
/// states.bin and statistics.csv. Returns 0, 2 (validation) or 3 (solver).
int run_command(const std::filesystem::path& config_path, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

/// Prints one line per invariant; returns 1 on any failure, 2 for an unknown suite.
int verify_command(std::string_view suite, const CommandOptions& options, std::ostream& out, std::ostream& err);

/// One run per value in <dir>/<axis>_<value>, plus <dir>/summary.csv.
int sweep_command(const std::filesystem::path& config_path, std::string_view axis, const std::vector<double>& values,
                  const CommandOptions& options, std::ostream& out, std::ostream& err);

} // namespace fracmono::cli
