#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqd {

using u64 = std::uint64_t;
using Rng = std::mt19937_64;

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int parity(u64 x) { return std::popcount(x) & 1; }

inline int dot2(u64 a, u64 b) { return parity(a & b); }

inline u64 low_mask(int bits) { return bits >= 64 ? ~u64{0} : ((u64{1} << bits) - 1); }

inline int bit_at(u64 x, int i) { return static_cast<int>((x >> i) & 1u); }

// SplitMix64 finalizer, used to derive independent seeds.
inline u64 mix64(u64 z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-trial stream: deterministic in (seed, stream) and independent of scheduling.
inline Rng stream_rng(u64 seed, u64 stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x63767164u};
    return Rng(seq);
}

inline int coin(Rng& rng) { return static_cast<int>(rng() & 1u); }

inline u64 random_bits(Rng& rng, int bits) { return rng() & low_mask(bits); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::string bit_string(u64 x, int bits) {
    std::string s(static_cast<std::size_t>(bits), '0');
    for (int i = 0; i < bits; ++i)
        if (bit_at(x, i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

} // namespace cvqd
