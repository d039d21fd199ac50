#pragma once

#include <cstdint>
#include <cmath>

namespace irg {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used for state seeding and
// for deriving independent substreams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream derivation: mix(s, k) gives the seed of substream k of master seed s.
// Defined as the splitmix64 finalizer applied to s + (k+1)*gamma, so distinct
// k map to well-separated points of the splitmix64 sequence. This is the
// documented mixing function used for replicate and sweep-cell streams.
inline std::uint64_t mix(std::uint64_t s, std::uint64_t k) {
    std::uint64_t z = s + 0x9E3779B97F4A7C15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ 1.0 (Blackman and Vigna, 2019). Small state, fast, and fully
// specified here so streams reproduce bit-exactly on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        std::uint64_t* s = state_;
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Number of failures before the first success at rate p in (0, 1).
    // Callers must handle p <= 0 and p >= 1 themselves.
    std::uint64_t geometric_skip(double p) {
        // 1 - u is in (0, 1], so the log is finite.
        double u = next_double();
        double g = std::floor(std::log1p(-u) / std::log1p(-p));
        if (g < 0.0) return 0;
        // clamp to a representable skip; callers treat it as "past the end"
        if (g >= 9.0e18) return static_cast<std::uint64_t>(9.0e18);
        return static_cast<std::uint64_t>(g);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace irg
