#pragma once

#include <cstdint>
#include <random>

namespace aqc {

// SplitMix64 step; used both as a mixer and for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Documented seed-splitting rule: stream `index` of `master` is
// splitmix64(master ^ splitmix64(index + 1)).  Realizations use
// index = realization_id, screens within a realization use a second split.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

// Deterministic uniform generator.  Mapping from raw 64-bit output to
// doubles is spelled out here (rather than relying on
// std::uniform_real_distribution) so results are stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace aqc
