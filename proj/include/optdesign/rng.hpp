#pragma once

#include <cstdint>

#include "optdesign/stats.hpp"

namespace optdesign {

/// Counter-based generator (splitmix64 finalizer over a keyed counter).
/// Each (seed, stream) pair is an independent substream, so replications can
/// run in parallel and still produce identical draws, and two runs that share
/// a stream index see common random numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ull;
        return mix(key_ + counter_);
    }

    /// Uniform draw strictly inside (0,1): bin midpoints (k + 1/2) / 2^52,
    /// all exactly representable, so neither endpoint can ever round in.
    double uniform() {
        const std::uint64_t z = next_u64() >> 12;
        return (static_cast<double>(z) + 0.5) * (1.0 / 4503599627370496.0);
    }

    /// Standard normal by inverse-CDF transform (one uniform per draw).
    double normal() { return normal_quantile(uniform()); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace optdesign
