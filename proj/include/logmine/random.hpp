#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace logmine {

// SplitMix64 finalizer. Used to spread raw seeds and to derive independent
// substream seeds from (seed, key) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

// FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(const unsigned char* data, std::size_t len,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t hash_tokens(std::span<const std::uint32_t> tokens) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint32_t t : tokens) {
        unsigned char bytes[4] = {static_cast<unsigned char>(t & 0xff),
                                  static_cast<unsigned char>((t >> 8) & 0xff),
                                  static_cast<unsigned char>((t >> 16) & 0xff),
                                  static_cast<unsigned char>((t >> 24) & 0xff)};
        h = fnv1a64(bytes, 4, h);
    }
    return h;
}

// Thin deterministic wrapper around std::mt19937_64. The standard pins the
// mt19937_64 sequence, so streams are reproducible across builds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next() { return gen_(); }

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive.
    std::size_t below(std::size_t n) {
        std::size_t v = static_cast<std::size_t>(unit() * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

    // Index drawn from an explicit probability vector (entries sum to ~1).
    std::size_t sample(std::span<const double> probs) {
        double u = unit();
        double cum = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.size() - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace logmine
