#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracmono/kernels/random.hpp"
#include "fracmono/operators/operator.hpp"

namespace fracmono::operators {

enum class SamplerKind { Uniform, Gaussian, SineSeries };

/// Distribution of random states. Every draw is multiplied by a magnitude
/// 10^U(-1, 1) so that the bounds are exercised across scales.
struct StateSampler {
    SamplerKind kind = SamplerKind::Uniform;
    double scale = 1.0;
    /// Number of sine modes for SineSeries.
    std::size_t modes = 8;

    [[nodiscard]] std::vector<double> draw(const Grid1D& grid, kernels::CounterRng& rng) const;
};

struct ConditionResult {
    explicit ConditionResult(std::string condition = {}) : name(std::move(condition)) {}

    std::string name;
    bool passed = true;
    /// Smallest normalised margin seen; negative means violated.
    double worst_margin = 0.0;
    std::size_t worst_trial = 0;
    /// States of the worst trial (second one empty for single-state checks).
    std::vector<double> violating_u;
    std::vector<double> violating_v;
    std::string detail;
};

struct StructuralReport {
    ConditionResult hemicontinuity{"H1 hemicontinuity"};
    ConditionResult monotonicity{"H2 monotonicity"};
    ConditionResult coercivity{"H3 coercivity"};
    ConditionResult growth{"H4 growth"};
    std::size_t samples = 0;
    StructuralConstants constants;
    /// min <A v, v> / ||v||_V^exponent and max ||A v||_{V*} / ||v||_V^(exponent-1).
    double delta_hat = 0.0;
    double C_hat = 0.0;

    [[nodiscard]] bool all_passed() const noexcept {
        return hemicontinuity.passed && monotonicity.passed && coercivity.passed && growth.passed;
    }
};

struct StructuralOptions {
    /// Allowed negative normalised margin (rounding only).
    double tolerance = 1e-10;
    std::size_t coarse_intervals = 16;
    std::size_t fine_intervals = 256;
    unsigned threads = 1;
};

/// Samples the four structural conditions.
///
/// H2: <A u - A v, u - v> over ||A u - A v||_{V*} ||u - v||_V.
/// H3: <A v, v> - delta ||v||_V^a + g over the larger side.
/// H4: growth_offset + C ||v||_V^(a-1) - ||A v||_{V*} over the bound.
/// H1: lambda -> <A(u + lambda w), x> on [-1, 1]; the largest increment on the
/// fine lambda-grid must not exceed 10 times the coarse-grid modulus scaled to
/// the fine spacing.
///
/// Trial k draws from CounterRng(splitmix64_mix(seed) + k), so the report does
/// not depend on the thread count.
StructuralReport verify_structural_conditions(const MonotoneOperator& op, const StateSampler& sampler,
                                              std::size_t trials, std::uint64_t seed,
                                              const StructuralOptions& options = {});

StructuralReport verify_structural_conditions(const OperatorSpec& spec, const TripleSpec& triple,
                                              const StateSampler& sampler, std::size_t trials, std::uint64_t seed,
                                              const StructuralOptions& options = {});

std::string format_report(const StructuralReport& report);

} // namespace fracmono::operators
