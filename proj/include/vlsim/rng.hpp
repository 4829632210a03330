#pragma once

// Deterministic random streams keyed by (seed, cell, year, phase).
//
// Every stochastic step opens a fresh stream for its key instead of
// sharing one sequential generator, so results are independent of cell
// iteration order and thread count, and the two engines can replay the
// same per-cell randomness (e.g. identical fire maps) by construction.
//
// uniform/bernoulli/binomial/poisson use only integer and basic IEEE
// arithmetic and are reproducible everywhere. normal() goes through
// libm (log/cos/sqrt) and is deterministic per host only.

#include <cstdint>

namespace vlsim {

enum class Phase : std::uint64_t {
    init = 1,
    fire_gen = 2,
    fire = 3,
    growth = 4,
    natural_death = 5,
    germination = 6,
    seed_bank = 7,
    consistency_fine = 8,
    consistency_coarse = 9,
};

class RngStream {
  public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        // splitmix64 step
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1]; safe as a log() argument
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n), unbiased enough for the small n used here (mul-high map)
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean, double sd);
    std::int64_t binomial(std::int64_t n, double p);
    std::int64_t poisson(double lambda);

  private:
    std::uint64_t state_;
};

// Stream whose state is a hash of the key tuple.
RngStream make_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t year, Phase phase);

}  // namespace vlsim
