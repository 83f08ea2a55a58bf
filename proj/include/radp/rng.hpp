// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cassert>
#include <cstdint>

#include "radp/types.hpp"

namespace radp {

/// SplitMix64 finalizer, used both as the generator core and to hash
/// (seed, stream index) pairs into independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * Seedable, splittable pseudo-random generator (SplitMix64 core).
 *
 * All draws are derived from raw 64-bit outputs rather than the standard
 * library distributions, so a given seed produces the same stream on every
 * platform. Streams derived via `stream(master, index)` are independent for
 * distinct indices.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derive the `index`-th independent stream of a master seed.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(mix64(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1).
    prec_t uniform() { return static_cast<prec_t>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    prec_t uniform(prec_t a, prec_t b) { return a + uniform() * (b - a); }

    /// Uniform integer in [0, n).
    long uniform_index(long n) {
        assert(n > 0);
        return static_cast<long>(next_u64() % static_cast<std::uint64_t>(n));
    }

    bool bernoulli(prec_t p) { return uniform() < p; }

    /// Categorical draw from a probability vector; the final index absorbs
    /// any rounding slack.
    long categorical(const numvec& probs) {
        const prec_t u = uniform();
        prec_t cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); i++) {
            cum += probs[i];
            if (u < cum) return static_cast<long>(i);
        }
        return static_cast<long>(probs.size()) - 1;
    }

private:
    std::uint64_t state_;
};

}  // namespace radp
