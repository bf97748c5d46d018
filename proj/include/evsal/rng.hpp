#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evsal {

/// Seeded random helpers on top of mt19937_64. The engine itself is
/// bit-stable across platforms; the standard <random> distributions are not,
/// so the few draws needed are derived here directly.
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// Exponential inter-arrival gap with the given rate (events per unit).
    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace evsal
