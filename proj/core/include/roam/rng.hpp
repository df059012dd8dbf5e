#pragma once

#include <cstdint>
#include <random>

namespace roam::rng {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-entity stream: stable under sharding and iteration order.
inline std::mt19937_64 stream(uint64_t seed, uint64_t entity) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(entity)));
}

// Unbiased draw from [0, n). Written out by hand because
// std::uniform_int_distribution is implementation-defined and outputs here
// must be reproducible byte-for-byte.
inline uint64_t bounded(std::mt19937_64& g, uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
        const uint64_t r = g();
        if (r >= threshold) return r % n;
    }
}

inline double unit(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

} // namespace roam::rng
