#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lcm {

// Deterministic generator shared by every sampling routine.
//
// The contract is fixed so that sequences are reproducible across standard
// library implementations: the engine is std::mt19937_64 seeded with the raw
// 64-bit seed, uniform() takes the top 53 bits of one engine output, and
// index(n) is floor(uniform() * n) clamped to n - 1. The std:: distributions
// are deliberately not used since their output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in {0, ..., n-1}; n must be positive.
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lcm
