#pragma once

// Counter-based random numbers for the Monte Carlo engine.
//
// Every normal draw is addressed by (seed, path, step, slot), so any piece of
// a simulation can be reproduced in isolation and parallel workers never need
// to share generator state.  The generator is Philox4x32 with 10 rounds; the
// uniform-to-normal map is Wichura's PPND16 inverse CDF, accurate to ~1e-15
// over the full open unit interval.

#include <array>
#include <cstdint>

namespace quintic {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace detail

// One 10-round Philox4x32 block.  Matches the reference test vectors of the
// original implementation (see tests/test_rng.cpp).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
    using namespace detail;
    for (int round = 0; round < 10; ++round) {
        philox_round(counter, key[0], key[1]);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return counter;
}

// Inverse standard normal CDF (algorithm AS 241, double precision branch).
double normal_inv_cdf(double p);

// Uniform in the open interval (0,1) built from 53 random bits (+1 guard bit
// so 0 is unreachable).
inline double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t v = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(v >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Addressed standard normal draw.  `slot` selects one of four independent
// normals per (path, step) cell; slots {0,1} come from one Philox block,
// {2,3} from the next, so a consumer that only ever touches slots 0..2 pays
// for exactly two block evaluations per step.
inline double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                          unsigned slot) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(path),
        static_cast<std::uint32_t>(path >> 32),
        static_cast<std::uint32_t>(step),
        static_cast<std::uint32_t>(step >> 32) ^ (slot >> 1),
    };
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
    };
    const auto words = philox4x32(ctr, key);
    const unsigned base = 2 * (slot & 1u);
    return normal_inv_cdf(uniform_from_bits(words[base], words[base + 1]));
}

// Same addressing scheme, returning the uniform before the normal map.
// Used by the bootstrap resampler, which wants integers rather than normals.
inline double uniform_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                           unsigned slot) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(path),
        static_cast<std::uint32_t>(path >> 32),
        static_cast<std::uint32_t>(step),
        static_cast<std::uint32_t>(step >> 32) ^ (slot >> 1),
    };
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
    };
    const auto words = philox4x32(ctr, key);
    const unsigned base = 2 * (slot & 1u);
    return uniform_from_bits(words[base], words[base + 1]);
}

}  // namespace quintic
