#pragma once

#include <cstdint>

namespace syngen {

/// Independent RNG streams derived from one run seed.
enum class SeedStream : std::uint64_t {
    encoder_init = 1,
    head_init = 2,
    frozen_init = 3,
    frozen_hash = 4,
    span_sampling = 5,
    training = 6,
};

/// splitmix64 of (seed, stream).
constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace syngen
