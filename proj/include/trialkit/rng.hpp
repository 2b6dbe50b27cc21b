#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace trialkit {

/// All randomness in the engine flows through this header so that sequences,
/// sessions, and simulations are bit-reproducible across platforms. The
/// generator is xoshiro256** seeded through SplitMix64; bounded integers use
/// rejection sampling on the raw 64-bit stream and reals take the top 53 bits.
/// No std::* distribution is used anywhere (their outputs are not portable).

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Folds an arbitrary mix of integers and strings into one 64-bit sub-seed.
inline std::uint64_t seedCombine(std::uint64_t seed) { return seed; }

template <typename... Rest>
std::uint64_t seedCombine(std::uint64_t seed, std::uint64_t next, Rest... rest);
template <typename... Rest>
std::uint64_t seedCombine(std::uint64_t seed, std::string_view next, Rest... rest);

template <typename... Rest>
std::uint64_t seedCombine(std::uint64_t seed, std::uint64_t next, Rest... rest) {
    std::uint64_t s = seed ^ (next + 0x9e3779b97f4a7c15ULL);
    return seedCombine(splitmix64(s), rest...);
}

template <typename... Rest>
std::uint64_t seedCombine(std::uint64_t seed, std::string_view next, Rest... rest) {
    return seedCombine(seed, fnv1a64(next), rest...);
}

class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
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

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin() { return (next() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Seeded Fisher-Yates; iterates i = n-1 .. 1, j uniform in [0, i].
template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

inline std::vector<int> randomPermutation(int n, Xoshiro256& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    shuffle(p, rng);
    return p;
}

}  // namespace trialkit
