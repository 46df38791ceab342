#pragma once

#include <cmath>
#include <cstdint>

namespace bflim {

// Counter-based generator built from the SplitMix64 finalizer. Each draw is
// a pure function of (seed, stream, index), so any prefix of a path can be
// regenerated without storing state and replications never share a stream.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t word(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
    const std::uint64_t base = mix64(mix64(seed + kGolden) ^ stream);
    return mix64(base + (index + 1) * kGolden);
}

// Derives an independent child seed; used to give each replication of a
// Monte Carlo experiment its own stream.
inline std::uint64_t split(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed ^ 0xD1B54A32D192ED03ull) + stream * kGolden);
}

// Maps a word to (0, 1): 52 high bits plus a half-ulp offset. Every result
// is the exact midpoint of one of 2^52 equal cells, so 0 and 1 are both
// unreachable (the largest value is 1 - 2^-53) and log(u) is always finite.
// A 53-bit mantissa would not do: its top midpoint rounds to exactly 1.
inline double uniform01(std::uint64_t w) {
    return static_cast<double>(w >> 12) * 0x1.0p-52 + 0x1.0p-53;
}

// Standard normal draw for time index t via the cosine branch of
// Box-Muller. Consumes words 2t and 2t+1 of the stream.
inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t t) {
    const double u1 = uniform01(word(seed, stream, 2 * t));
    const double u2 = uniform01(word(seed, stream, 2 * t + 1));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace rng

}  // namespace bflim
