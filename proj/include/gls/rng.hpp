#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace gls {

// Stream layout: every draw belongs to a fixed-size block, and block b of
// stream s under seed k is generated by xoshiro256** seeded through
// SplitMix64 from (k, s, b). Results never depend on how blocks are
// assigned to threads.

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t block) noexcept {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s = h ^ (stream * 0xd1b54a32d192ed03ULL);
    h = splitmix64(s);
    s = h ^ (block * 0x8cb92ba72f3d8dd7ULL);
    return splitmix64(s);
}

/// xoshiro256** 1.0 (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Variate transforms are written out here rather than taken from <random>
// because the standard distributions are not bit-identical across
// library implementations.

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Xoshiro256& g) noexcept {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform on the open interval (0, 1).
inline double uniform_open(Xoshiro256& g) noexcept {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline double random_sign(Xoshiro256& g) noexcept {
    return (g() >> 63) ? -1.0 : 1.0;
}

inline double standard_exponential(Xoshiro256& g) noexcept {
    return -std::log(uniform_open(g));
}

/// Box-Muller, one normal per pair of uniforms.
inline double standard_normal(Xoshiro256& g) noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open(g)));
    return r * std::cos(2.0 * std::numbers::pi * uniform01(g));
}

}  // namespace gls
