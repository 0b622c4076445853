#pragma once

#include <cmath>
#include <cstdint>

namespace fracmono::kernels {

/// SplitMix64 finalizer; the output mix used by every generator in the library.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based 64-bit generator: draw i of stream `seed` is
/// splitmix64_mix(key + (i+1) * 0x9e3779b97f4a7c15) with key = splitmix64_mix(seed).
/// The sequence is a pure function of (seed, i) on every platform.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(splitmix64_mix(seed)) {}

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return splitmix64_mix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exp(1) by inversion: -log(U).
    double exponential() noexcept { return -std::log(uniform_open()); }

    [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Standard normal variates by the Marsaglia polar method on top of CounterRng.
/// Pairs are produced in order (first the u-branch, then the cached v-branch).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) noexcept : rng_(seed) {}

    double next() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * rng_.uniform_open() - 1.0;
            v = 2.0 * rng_.uniform_open() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

private:
    CounterRng rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fracmono::kernels
