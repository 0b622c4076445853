#include "fracmono/operators/structural.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace fracmono::operators {

std::vector<double> StateSampler::draw(const Grid1D& grid, kernels::CounterRng& rng) const {
    const std::size_t n = grid.n_interior;
    const double magnitude = scale * std::pow(10.0, 2.0 * rng.uniform_open() - 1.0);
    std::vector<double> out(n, 0.0);
    switch (kind) {
    case SamplerKind::Uniform:
        for (auto& x : out) x = magnitude * (2.0 * rng.uniform_open() - 1.0);
        break;
    case SamplerKind::Gaussian:
    case SamplerKind::SineSeries: {
        kernels::GaussianStream gauss(rng.next_u64());
        if (kind == SamplerKind::Gaussian) {
            for (auto& x : out) x = magnitude * gauss.next();
            break;
        }
        for (std::size_t k = 1; k <= modes; ++k) {
            const double a = magnitude * gauss.next() / static_cast<double>(k);
            for (std::size_t i = 0; i < n; ++i)
                out[i] += a * std::sin(static_cast<double>(k) * std::numbers::pi * grid.x(i) / grid.length);
        }
        break;
    }
    }
    return out;
}

namespace {

constexpr double kTiny = 1e-300;

struct TrialStates {
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> x;
};

TrialStates draw_trial(const MonotoneOperator& op, const StateSampler& sampler, std::uint64_t seed, std::size_t k) {
    kernels::CounterRng rng(kernels::splitmix64_mix(seed) + k);
    TrialStates s;
    s.u = sampler.draw(op.triple().grid, rng);
    s.v = sampler.draw(op.triple().grid, rng);
    s.x = sampler.draw(op.triple().grid, rng);
    return s;
}

struct TrialOutcome {
    // H1, H2, H3, H4
    std::array<double, 4> margin{};
    double delta_ratio = std::numeric_limits<double>::infinity();
    double C_ratio = 0.0;
};

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

double hemicontinuity_margin(const MonotoneOperator& op, const TrialStates& s, const StructuralOptions& opt) {
    auto profile = [&](std::size_t intervals) {
        std::vector<double> values(intervals + 1);
        std::vector<double> point(s.u.size());
        for (std::size_t k = 0; k <= intervals; ++k) {
            const double lambda = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(intervals);
            for (std::size_t i = 0; i < point.size(); ++i) point[i] = s.u[i] + lambda * s.v[i];
            values[k] = op.pairing(op.apply(0.0, point), s.x);
        }
        return values;
    };
    auto largest_step = [](const std::vector<double>& f) {
        double m = 0.0;
        for (std::size_t k = 1; k < f.size(); ++k) m = std::max(m, std::fabs(f[k] - f[k - 1]));
        return m;
    };
    const auto coarse = profile(opt.coarse_intervals);
    const auto fine = profile(opt.fine_intervals);
    double scale = 0.0;
    for (double f : fine) scale = std::max(scale, std::fabs(f));
    const double ratio = static_cast<double>(opt.coarse_intervals) / static_cast<double>(opt.fine_intervals);
    const double allowed = 10.0 * largest_step(coarse) * ratio + 1e-12 * (1.0 + scale);
    const double observed = largest_step(fine);
    return (allowed - observed) / std::max(allowed, kTiny);
}

TrialOutcome evaluate(const MonotoneOperator& op, const StructuralConstants& c, const TrialStates& s,
                      const StructuralOptions& opt) {
    TrialOutcome out;
    out.margin[0] = hemicontinuity_margin(op, s, opt);

    const auto au = op.apply(0.0, s.u);
    const auto av = op.apply(0.0, s.v);
    const auto da = difference(au, av);
    const auto duv = difference(s.u, s.v);
    const double gap = op.pairing(da, duv);
    const double scale2 = op.norm_Vstar(da) * op.norm_V(duv);
    out.margin[1] = scale2 > kTiny ? gap / scale2 : (gap >= 0.0 ? 0.0 : -1.0);

    const double nv = op.norm_V(s.u);
    const double pair = op.pairing(au, s.u);
    const double lower = c.delta * std::pow(nv, c.exponent) - c.g;
    const double scale3 = std::max({std::fabs(pair), std::fabs(lower), kTiny});
    out.margin[2] = (pair - lower) / scale3;

    const double na = op.norm_Vstar(au);
    const double bound = c.growth_offset + c.C * std::pow(nv, c.exponent - 1.0);
    out.margin[3] = (bound - na) / std::max({bound, na, kTiny});

    if (nv > kTiny) {
        out.delta_ratio = pair / std::pow(nv, c.exponent);
        out.C_ratio = na / std::pow(nv, c.exponent - 1.0);
    }
    return out;
}

} // namespace

StructuralReport verify_structural_conditions(const MonotoneOperator& op, const StateSampler& sampler,
                                              std::size_t trials, std::uint64_t seed,
                                              const StructuralOptions& options) {
    StructuralReport report;
    report.samples = trials;
    report.constants = op.constants();
    if (trials == 0) return report;

    std::vector<TrialOutcome> outcomes(trials);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
            outcomes[k] = evaluate(op, report.constants, draw_trial(op, sampler, seed, k), options);
    };
    const std::size_t n_threads = std::clamp<std::size_t>(options.threads, 1, trials);
    if (n_threads == 1) {
        work(0, trials);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (trials + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(trials, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }

    std::array<ConditionResult*, 4> results{&report.hemicontinuity, &report.monotonicity, &report.coercivity,
                                            &report.growth};
    report.delta_hat = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < 4; ++c) {
        auto& r = *results[c];
        r.worst_margin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < trials; ++k) {
            if (outcomes[k].margin[c] < r.worst_margin) {
                r.worst_margin = outcomes[k].margin[c];
                r.worst_trial = k;
            }
        }
        r.passed = r.worst_margin >= -options.tolerance;
        if (!r.passed) {
            auto states = draw_trial(op, sampler, seed, r.worst_trial);
            r.violating_u = std::move(states.u);
            if (c <= 1) r.violating_v = std::move(states.v);
        }
        std::ostringstream msg;
        msg << "worst normalised margin " << r.worst_margin << " at trial " << r.worst_trial;
        r.detail = msg.str();
    }
    for (const auto& o : outcomes) {
        report.delta_hat = std::min(report.delta_hat, o.delta_ratio);
        report.C_hat = std::max(report.C_hat, o.C_ratio);
    }
    return report;
}

StructuralReport verify_structural_conditions(const OperatorSpec& spec, const TripleSpec& triple,
                                              const StateSampler& sampler, std::size_t trials, std::uint64_t seed,
                                              const StructuralOptions& options) {
    const auto op = make_operator(spec, triple);
    return verify_structural_conditions(*op, sampler, trials, seed, options);
}

std::string format_report(const StructuralReport& report) {
    std::ostringstream out;
    for (const auto* r : {&report.hemicontinuity, &report.monotonicity, &report.coercivity, &report.growth})
        out << (r->passed ? "PASS " : "FAIL ") << r->name << ": " << r->detail << '\n';
    out << "samples " << report.samples << ", delta_hat " << report.delta_hat << " (delta "
        << report.constants.delta << "), C_hat " << report.C_hat << " (C " << report.constants.C << ")\n";
    return out.str();
}

} // namespace fracmono::operators
