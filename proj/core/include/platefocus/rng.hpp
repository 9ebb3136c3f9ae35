#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace platefocus {

/// Reproducible random stream. Draw conversions are written out explicitly so
/// a seed yields the same sequence with any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) noexcept {
        constexpr std::uint64_t top = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = top - top % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace platefocus
