// rng.hpp -- deterministic pseudo-random generation.
//
// Everything downstream (encoders, trial workers, the simulator) promises
// bit-identical results for a given seed, so we avoid std::uniform_*
// distributions (their output is implementation-defined) and generate
// bounded integers and doubles ourselves.

#pragma once

#include <cstdint>
#include <initializer_list>

namespace fountain {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Folds an ordered tuple of integers into one 64-bit seed. Used to derive
// independent per-trial generators from (master seed, slice, trial index).
inline std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8f1bbcdcbfa53e0bull;
    for (std::uint64_t v : parts)
        h = splitmix64(h ^ v);
    return h;
}

// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm = splitmix64(sm);
            word = sm;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound). Lemire multiply-shift with rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace fountain
