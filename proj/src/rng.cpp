#include "mmudn/rng.hpp"

#include <cmath>
#include <numbers>

namespace mmudn {

double SplitMix64::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    // uniform() can return exactly 0; shift into (0, 1] for the log.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t index,
                       std::uint64_t stream_tag) {
    auto scramble = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = scramble(base_seed + 0x9e3779b97f4a7c15ULL);
    h = scramble(h ^ (index + 0x9e3779b97f4a7c15ULL));
    h = scramble(h ^ (stream_tag + 0x9e3779b97f4a7c15ULL));
    return h;
}

}  // namespace mmudn
