#pragma once

#include <cmath>
#include <cstdint>

namespace ctrw {

/// Counter-based random stream: every draw is a stateless hash of
/// (seed, stream, counter), so stream `i` produces the same numbers no
/// matter which thread runs it or how work is partitioned. Two keyed
/// 64-bit finalizer rounds (SplitMix64 mixer) per draw.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed + kGolden * (stream + 1))),
          tweak_(mix(seed ^ (stream * kGolden) ^ kTweakSalt)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = mix(key_ + kGolden * ++counter_);
        return mix(z ^ tweak_);
    }

    /// Uniform strictly inside (0, 1); 53 significant bits.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Inverse-transform exponential with the given rate.
    double next_exponential(double rate) {
        return -std::log(next_uniform()) / rate;
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kTweakSalt = 0xD1B54A32D192ED03ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t tweak_;
    std::uint64_t counter_ = 0;
};

} // namespace ctrw
