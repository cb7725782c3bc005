#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sigmanet {

// Stream tags handed to mix_seed so independent consumers of one master seed
// never share a sequence.
inline constexpr std::uint64_t kStreamDsbm = 0xd5b1;
inline constexpr std::uint64_t kStreamFlip = 0xf11b;
inline constexpr std::uint64_t kStreamSplit = 0x5b17;
inline constexpr std::uint64_t kStreamInit = 0x1717;
inline constexpr std::uint64_t kStreamDropout = 0xd0d0;
inline constexpr std::uint64_t kStreamNegatives = 0x4e47;

// splitmix64 step; used to derive independent sub-stream seeds from a master
// seed so that fold / epoch / sampling streams never alias.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic draws on top of mt19937_64. All distributions are implemented
// here (not via std::uniform_*_distribution) so that the exact stream is fixed
// by this code alone and identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, n) by rejection.
    std::size_t index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return static_cast<std::size_t>(v % n);
    }

    long uniform_int(long lo, long hi) {
        return lo + static_cast<long>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    // Uniform in [0, 1) with 53 random bits.
    double real01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * real01(); }

    bool bernoulli(double p) { return real01() < p; }

    template <typename V>
    void shuffle(V& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace sigmanet
