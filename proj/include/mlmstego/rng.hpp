#pragma once

#include <cstdint>
#include <vector>

namespace mlmstego {

// Portable deterministic generator (splitmix64). Used wherever reproducibility
// across builds and processes matters: weight init, training shuffles, eval
// message sampling. std:: distributions are implementation-defined, so they
// are avoided on these paths.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-limit, limit).
    double next_symmetric(double limit) { return (2.0 * next_unit() - 1.0) * limit; }

    /// Uniform integer in [0, n). n must be > 0.
    uint64_t next_below(uint64_t n) { return next() % n; }

    /// Single random bit.
    int next_bit() { return static_cast<int>(next() >> 63); }

private:
    uint64_t state_;
};

/// Fisher-Yates shuffle driven by SplitMix64, bit-stable everywhere.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace mlmstego
