// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace bdris {

// SplitMix64 mixing step. Used to derive independent, well-separated stream
// seeds from a master seed without coupling between stream indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream seed for realization (or sub-stream) `index` under `master_seed`.
// Same (master, index) always yields the same stream.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
}

// Small deterministic RNG wrapper. The raw engine is std::mt19937_64; the
// distributions are implemented here (not via <random> distribution objects)
// so that the exact sample sequence is identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one cached deviate.
    double normal() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // Avoid log(0).
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        cache_ = r * std::sin(phi);
        has_cache_ = true;
        return r * std::cos(phi);
    }

    // Exponential with the given mean (inverse CDF).
    double exponential(double mean) {
        double u = uniform();
        while (u >= 1.0) u = uniform();
        return -mean * std::log1p(-u);
    }

    // Circularly-symmetric complex normal with unit variance per complex sample.
    std::complex<double> complex_normal() {
        return {normal() * M_SQRT1_2, normal() * M_SQRT1_2};
    }

private:
    std::mt19937_64 engine_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

}  // namespace bdris
