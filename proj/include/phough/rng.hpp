#pragma once

#include <cstdint>
#include <random>

namespace phough {

// Deterministic random source used by the scene generator and the experiment
// harness. The engine is std::mt19937_64, whose output sequence is pinned by
// the standard; the real-valued draws below use an explicit 53-bit mapping
// instead of std::uniform_real_distribution (whose output is not pinned), so
// a given seed produces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform draw in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform draw in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Uniform draw in {0, ..., n-1}.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent per-stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed for sub-stream `stream` of a master seed (scene index, trial index...).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 1));
}

}  // namespace phough
