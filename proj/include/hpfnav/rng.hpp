#pragma once

#include <cstdint>
#include <utility>

namespace hpfnav {

// Deterministic noise generator (splitmix64). The state advances by the
// constant 0x9E3779B97F4A7C15; the output is the advanced state put through
// two xor-shift-multiply rounds (constants 0xBF58476D1CE4E5B9 and
// 0x94D049BB133111EB) and a final 31-bit xor-shift. uniform01 keeps the top
// 53 bits scaled by 2^-53, giving a double in [0, 1). Identical seeds
// reproduce identical sequences on any implementation of this recipe; the
// first output for seed 0 is 0xE220A8397B1DCDAF.
struct Rng {
    std::uint64_t state = 0;

    explicit Rng(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Value in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Value in [-half_width, +half_width].
    double uniform_symmetric(double half_width) {
        return half_width * (2.0 * uniform01() - 1.0);
    }
};

/// Functional form: returns (value in [0,1), advanced state).
inline std::pair<double, std::uint64_t> rng_next(std::uint64_t state) {
    Rng r(state);
    const double v = r.uniform01();
    return {v, r.state};
}

}  // namespace hpfnav
