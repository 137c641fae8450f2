#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aid {

/// Counter-based 64-bit generator.
///
/// Output k of stream s under seed S is `mix(key + (k + 1) * G)` where
/// `G = 0x9E3779B97F4A7C15`, `mix` is the SplitMix64 finalizer and
/// `key = mix(S ^ mix(s * G + 0xD1B54A32D192ED03))`. Because every draw is a pure
/// function of (seed, stream, counter), sequences are identical on every
/// platform, and independent streams are obtained with split().
///
/// All derived distributions (uniform, normal, Laplace, index sampling) are
/// implemented here rather than through <random> distributions, whose
/// algorithms are implementation-defined.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Standard normal via Box-Muller (both variates used).
    double normal() noexcept;
    /// Laplace(0, scale) by inversion.
    double laplace(double scale) noexcept;
    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Independent generator for sub-stream `stream` of this generator's seed.
    CounterRng split(std::uint64_t stream) const { return CounterRng(seed_, stream_ * 0x100000001B3ULL + stream + 1); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// `count` distinct indices from [0, n) in increasing order (Floyd's algorithm).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, CounterRng& rng);

/// Fisher-Yates shuffle driven by CounterRng.
void shuffle_indices(std::vector<std::size_t>& values, CounterRng& rng);

}  // namespace aid
