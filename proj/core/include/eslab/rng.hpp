#pragma once

#include <cstdint>
#include <limits>

namespace eslab {

/// Stafford "mix13" finalizer used by SplitMix64. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed of the trial_index-th independent stream under master_seed.
///
/// mix64(mix64(master ^ K0) + trial * G + K1): injective in each argument with
/// the other held fixed, full avalanche, no platform-dependent arithmetic.
constexpr std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
    return mix64(mix64(master_seed ^ 0x5851f42d4c957f2dull) + trial_index * 0x9e3779b97f4a7c15ull +
                 0x632be59bd9b4e019ull);
}

/// SplitMix64 (Steele, Lea and Flood). State transition: s += 0x9e3779b97f4a7c15;
/// output: mix64(s). Period 2^64. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return mix64(state_ += 0x9e3779b97f4a7c15ull); }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

/// Standard normal variates by Marsaglia's polar method.
///
/// Each attempt draws u, v = 2 U - 1 from two consecutive uniforms and rejects
/// the pair unless 0 < u^2 + v^2 < 1. An accepted pair yields u f then v f with
/// f = sqrt(-2 ln s / s). With negate set, every variate is returned negated,
/// which leaves the uniform stream untouched.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed, bool negate = false) noexcept
        : engine_(seed), sign_(negate ? -1.0 : 1.0) {}

    double operator()() noexcept;

    /// Gamma(shape, 1) by Marsaglia and Tsang; shape > 0.
    double gamma(double shape) noexcept;

    SplitMix64& engine() noexcept { return engine_; }

  private:
    SplitMix64 engine_;
    double sign_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace eslab
