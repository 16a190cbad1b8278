// random.hpp - counter-based randomness.
//
// Draws are a pure function of (seed, counter...) so that serial and
// parallel evaluation produce identical streams.

#pragma once

#include <cstddef>
#include <cstdint>

namespace otfsaf {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (a * 0xd1b54a32d192ed03ULL));
    h = mix64(h ^ (b * 0xabc98388fb8fac03ULL));
    return h;
}

/// Seed for the r-th independent stream derived from a master seed.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) + stream);
}

/// Maps a 64-bit hash to [0, bound) with the multiply-high reduction.
inline std::size_t uniform_index(std::uint64_t h, std::size_t bound) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(h) * bound) >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits of a hash.
constexpr double uniform_unit(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace otfsaf
