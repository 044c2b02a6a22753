#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace xmodal {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent streams from one user seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x632be59bd9b4e019ULL * (stream + 1));
}

// The helpers below avoid std::*_distribution, whose exact output is
// implementation-defined; results must be identical on every platform.

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Unbiased integer in [0, n); n must be >= 1.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

// Standard normal via Box-Muller; consumes exactly two draws per call.
inline double gaussian(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace xmodal
