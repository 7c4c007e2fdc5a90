#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fogsense::sim {

// Seeded global stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the C++ standard for a given seed; the bounded and real draws
// below are derived from raw 64-bit outputs with integer arithmetic only, so
// the whole draw sequence is bit-identical across platforms. (The standard
// distributions are implementation-defined and are deliberately not used.)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0. Rejection sampling
    /// removes modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi);

    /// Uniform double in [0, 1) built from the top 53 bits.
    double unit();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Chooses min(k, n) distinct indices from [0, n) with a partial
    /// Fisher-Yates shuffle; result order is draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace fogsense::sim
