#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "drlsim/geom.hpp"

namespace drlsim {

/// Deterministic random source. The engine is std::mt19937_64 (its output
/// sequence is pinned by the standard); the distributions are hand-rolled so
/// that draws are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(engine_()) * static_cast<__uint128_t>(n)) >> 64);
    }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(geom::kTwoPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Mix a seed with a salt into an independent stream seed (splitmix64 step).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
        std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ull + 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace drlsim
