#pragma once

#include <cstdint>
#include <random>

namespace hybev {

// splitmix64; used to derive independent per-unit seeds (per tree, per fold)
// so parallel schedules cannot change results.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) {
    return Rng(seed);
}

} // namespace hybev
