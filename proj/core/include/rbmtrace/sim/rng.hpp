#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rbmtrace::sim {

// Counter-based random numbers: every variate is a pure function of
// (seed, counter), so results do not depend on thread scheduling or on
// how work is split across paths.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// SplitMix64 finalizer (bijective avalanche).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27; z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

/// Stateless hash of (seed, a, b); used both as the per-step generator
/// key and as the per-path seed derivation.
inline constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                            std::uint64_t b = 0) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + kGolden));
    return h;
}

inline double u01_open_closed(std::uint64_t h) {  // (0, 1]
    return static_cast<double>((h >> 11) + 1) * 0x1p-53;
}

inline double u01_right_open(std::uint64_t h) {  // [0, 1)
    return static_cast<double>(h >> 11) * 0x1p-53;
}

inline double u01_open(std::uint64_t h) {  // (0, 1)
    return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

/// Standard normal keyed by (seed, step, component). Box-Muller, cosine
/// branch; two hashes per variate.
inline double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t comp) {
    const double u1 = u01_open_closed(counter_hash(seed, step, 2ull * comp));
    const double u2 = u01_right_open(counter_hash(seed, step, 2ull * comp + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Exponential(1) keyed by (seed, step, component).
inline double counter_exponential(std::uint64_t seed, std::uint64_t step, std::uint32_t comp) {
    return -std::log(u01_open_closed(counter_hash(seed, step, comp)));
}

/// Gaussian increments of one simulated path.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}
    double normal(std::uint64_t step, std::uint32_t comp) const {
        return counter_normal(seed_, step, comp);
    }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace rbmtrace::sim
