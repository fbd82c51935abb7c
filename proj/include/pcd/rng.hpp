#pragma once

#include <cstdint>

namespace pcd {

// SplitMix64: a counter-based 64-bit generator (state_k = seed + k * gamma,
// output = finalizer(state_k)). Replicate substreams are derived by hashing
// the stream id into the seed, so parallel replicates produce the same
// numbers regardless of scheduling order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    Rng substream(std::uint64_t id) const {
        return Rng(mix(state_ ^ mix(id + 0x632BE59BD9B4E019ULL)));
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) { return next() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace pcd
