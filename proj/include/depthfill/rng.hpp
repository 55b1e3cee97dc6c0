#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace depthfill {

// Derives an independent stream seed from (seed, salt) via splitmix64.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG helpers. std::mt19937_64 is a fully specified engine,
// but the standard distributions are implementation-defined, so draws that
// must be reproducible byte-for-byte go through these helpers instead.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n) via rejection sampling.
    uint64_t next_below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace depthfill
