#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace holopt {

// Every random draw in this project goes through the helpers below so that
// results are reproducible bit-for-bit across platforms.  The generator and
// the uint64 -> double mapping together form the algorithm recorded in
// dataset files; changing either is a breaking format change.
inline constexpr const char* kRngAlgorithm = "mt19937_64/u53-v1";

using Rng = std::mt19937_64;

// Uniform double in [0, 1) using the top 53 bits of one 64-bit draw.
// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Standard exponential by inverse CDF; log1p keeps precision for small u.
inline double exponential(Rng& rng) {
    return -std::log1p(-uniform01(rng));
}

namespace detail {
inline uint64_t splitmix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

// Deterministic sub-seed for (label, n, index) under a master seed: FNV-1a
// over the raw bytes, then a splitmix64 finalizer to spread low-entropy
// inputs across the full 64-bit range.
inline uint64_t derive_seed(uint64_t master, const std::string& label, int n, long index) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const unsigned char* bytes, size_t len) {
        for (size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((master >> (8 * i)) & 0xff);
    mix(buf, 8);
    mix(reinterpret_cast<const unsigned char*>(label.data()), label.size());
    uint32_t un = static_cast<uint32_t>(n);
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((un >> (8 * i)) & 0xff);
    mix(buf, 4);
    uint64_t ui = static_cast<uint64_t>(index);
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((ui >> (8 * i)) & 0xff);
    mix(buf, 8);
    return detail::splitmix64(h);
}

}  // namespace holopt
