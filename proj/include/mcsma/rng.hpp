#pragma once

#include <cstdint>
#include <random>

namespace mcsma {

// Deterministic stream keyed by (seed, replica, stream). Replicas and
// streams are decorrelated by splitmix64 chaining before seeding the
// engine, so parallel replicas stay independent and reproducible.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t replica = 0, std::uint64_t stream = 0) {
        std::uint64_t s = seed;
        const std::uint64_t a = mix(s += 0x9E3779B97F4A7C15ull ^ replica);
        const std::uint64_t b = mix(s += 0x9E3779B97F4A7C15ull ^ stream);
        const std::uint64_t c = mix(s += 0x9E3779B97F4A7C15ull);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        engine_.seed(seq);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, 1): strictly positive variant for logarithms.
    double uniform_pos() {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return u;
    }

    std::uint64_t next() { return engine_(); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace mcsma
