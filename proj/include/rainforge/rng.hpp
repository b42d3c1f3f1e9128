#pragma once

// Counter-based random streams. Every stream is addressed by (seed, stream id)
// and its k-th value is a pure function of (seed, stream id, k), so work can be
// split across threads without changing results.

#include <cstdint>

namespace rainforge {

// Identifier recorded in manifests. Bump when the bit stream changes.
inline constexpr const char* rng_algorithm_id = "splitmix64-counter-v1";

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class CounterRng {
  public:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) + (stream + 1) * golden)} {}

    constexpr std::uint64_t next_u64() { return mix64(key_ + (++counter_) * golden); }

    // Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Jump to an absolute position in the stream.
    constexpr void seek(std::uint64_t index) { counter_ = index; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream ids reserved for non-per-drop draws. Per-drop streams use the drop id
// directly, so these sit at the top of the id space.
inline constexpr std::uint64_t poisson_count_stream = ~0ULL;
inline constexpr std::uint64_t atlas_choice_stream = ~0ULL - 1;

// Poisson variate with the given mean, drawn from `rng`. Uses the
// multiplication method for small means and Hormann's PTRS otherwise.
std::uint64_t sample_poisson(double mean, CounterRng& rng);

}  // namespace rainforge
