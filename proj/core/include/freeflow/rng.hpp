#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace freeflow::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic child-stream derivation used everywhere a (base seed, index)
/// pair names an independent stream (per tree, per fold, per record):
///   derive_seed(base, i) = mix64(base + kGolden * (i + 1))
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base + kGolden * (index + 1));
}

/// splitmix64 generator. All bounded and floating draws are defined in terms
/// of next() so identical seeds give identical streams on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform integer in [0, bound), bound > 0, via the multiply-high mapping.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// One normal draw via Box-Muller; the sine half is discarded so each
    /// call consumes exactly two uniforms.
    double next_normal(double mean, double stddev) noexcept {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace freeflow::rng
