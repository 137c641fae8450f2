#include "aid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace aid {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(mix64(seed ^ mix64(stream * kGolden + kStreamSalt))) {}

std::uint64_t CounterRng::next() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() noexcept {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
}

double CounterRng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double CounterRng::laplace(double scale) noexcept {
    const double u = uniform_open() - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
    // Rejection on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % bound));
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, CounterRng& rng) {
    count = std::min(count, n);
    std::vector<std::size_t> out;
    if (count == n) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(count * 2);
    for (std::size_t j = n - count; j < n; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    out.assign(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

void shuffle_indices(std::vector<std::size_t>& values, CounterRng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace aid
