// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "spreadid/types.hpp"

namespace spreadid {

// Counter-splittable splitmix64 stream. Every consumer derives its own stream
// from (seed, stream id), so results do not depend on evaluation order or
// on how work is scheduled. All distributions are generated portably here
// (no std::distribution, whose output is implementation defined).
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static Rng stream(uint64_t seed, uint64_t id) {
        // hash the pair so neighbouring ids give unrelated streams
        return Rng(mix(seed ^ mix(id + 0x632BE59BD9B4E019ULL)));
    }
    Rng substream(uint64_t id) const { return stream(state_, id); }

    uint64_t u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return u64() % n; }

    // standard normal via Box-Muller
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // circularly symmetric complex normal with E|z|^2 = 1
    cd cnormal() {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        double re = normal();
        double im = normal();
        return {re * inv_sqrt2, im * inv_sqrt2};
    }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

}  // namespace spreadid
