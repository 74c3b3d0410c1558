#pragma once

#include <cstdint>

namespace mmudn {

// SplitMix64 (Steele/Lea/Flood). One 64-bit word of state, an invertible
// output permutation, and a full 2^64 period. Used both as the simulation
// PRNG and, via mix_seed, as the hash that derives independent per-snapshot
// and per-stream seeds, which is what reproducible parallel Monte-Carlo
// needs.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second value of each generated
    // pair is cached so consecutive calls consume uniform pairs.
    double normal();

private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

// Collapses (base_seed, index, stream_tag) into a single seed by chaining
// the SplitMix64 output permutation. Nearby indices or stream tags give
// unrelated seeds, so parallel snapshots and distinct random purposes never
// share a stream.
std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t index,
                       std::uint64_t stream_tag);

// Stream tags: a random purpose never reuses another purpose's stream even
// at the same (base_seed, index). AN and UE positions use separate streams
// so that growing M leaves UE draws (and the first AN draws) unchanged:
// sweeps over M then share topology randomness point-to-point.
namespace stream {
inline constexpr std::uint64_t kAnPositions = 1;
inline constexpr std::uint64_t kUePositions = 2;
inline constexpr std::uint64_t kShadowing = 3;
inline constexpr std::uint64_t kCalibration = 4;
inline constexpr std::uint64_t kValidation = 5;
}  // namespace stream

}  // namespace mmudn
