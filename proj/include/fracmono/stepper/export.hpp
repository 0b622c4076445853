#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracmono/stepper/solver.hpp"

namespace fracmono::stepper {

/// Columns t,norm_H,norm_V,newton_iters,residual. Each comment line is written
/// first, prefixed with "# ". Doubles use %.17g.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& trajectory,
                          const std::vector<std::string>& comments = {});

/// Binary dump, little-endian: uint64 n_nodes, uint64 n_dof, float64 beta,
/// float64 dt, then n_nodes * n_dof float64 states in row-major order.
void write_state_dump(const std::filesystem::path& path, const TrajectoryRecord& trajectory);

struct StateDump {
    double beta = 0.0;
    double dt = 0.0;
    NodalSeries states;
};

StateDump read_state_dump(const std::filesystem::path& path);

} // namespace fracmono::stepper
