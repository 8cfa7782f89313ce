#pragma once

#include <cstdint>
#include <cstddef>

#include "odp/tensor.hpp"

namespace odp {

// xoshiro256++ with splitmix64 seeding. Deterministic across platforms:
// no std::random_engine or std::distribution anywhere in the hot path.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double uniform01();
    // Uniform in (0, 1]; safe as a log argument.
    double uniform_pos();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Standard normal via Box-Muller, cosine branch. Consumes exactly two
    // uniform draws per call, no caching, so streams stay reproducible.
    double normal();

    // Independent stream derived from this one's seed and an index.
    Rng derive(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t s_[4];
    std::uint64_t seed_;
};

Vec gauss(Rng& rng, std::size_t n);

} // namespace odp
