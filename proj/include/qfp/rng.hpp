#pragma once

#include <cstdint>

namespace qfp {

// Counter-based random stream. The state is fully described by (seed, counter),
// so any draw can be reproduced from those two numbers alone; substreams are
// derived by hashing an index into the seed, which keeps parallel consumers
// order-independent.
class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(uint64_t seed, uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    uint64_t seed() const { return seed_; }
    uint64_t counter() const { return counter_; }

    uint64_t next_u64() {
        ++counter_;
        return mix(seed_ + counter_ * 0x9E3779B97F4A7C15ull);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    RngStream derive(uint64_t index) const { return RngStream(seed_ ^ mix(index + 1)); }

    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

  private:
    uint64_t seed_ = 0;
    uint64_t counter_ = 0;
};

}  // namespace qfp
