/// @file rng.hpp
/// @brief Tiny deterministic RNG for reproducible start vectors and tests.

#ifndef SLR_RNG_HPP
#define SLR_RNG_HPP

#include <cstdint>

#include "slr/sparse_matrix.hpp"

namespace slr {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in (-1, 1).
    double uniform() {
        return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    }
    void fill_uniform(std::span<double> v) {
        for (double& x : v) x = uniform();
    }
};

}  // namespace slr

#endif  // SLR_RNG_HPP
