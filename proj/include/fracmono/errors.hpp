#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace fracmono {

/// Raised when an iterative nonlinear solve does not reach its tolerance.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double last_residual, std::size_t iterations)
        : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }
    [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

    /// Time node at which the failure happened, when raised from a marching scheme.
    std::optional<std::size_t> node;
    /// Path seed, when raised from a stochastic solve.
    std::optional<std::uint64_t> seed;

private:
    double last_residual_;
    std::size_t iterations_;
};

} // namespace fracmono
