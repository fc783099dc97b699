#pragma once

#include <cstdint>
#include <random>

namespace apcircle {

/// Uniform in [0, n), n >= 1, by rejection.  The standard distributions are
/// not specified bit-for-bit, so seeded runs use this instead.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/// Uniform in [lo, hi], lo <= hi.
inline std::uint64_t uniform_between(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + uniform_below(rng, hi - lo + 1);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace apcircle
