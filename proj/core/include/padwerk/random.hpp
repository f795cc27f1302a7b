#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace padwerk {

/// Seeded random source used everywhere randomness is consumed.
///
/// Only the engine comes from the standard library; the derived draws are
/// computed here so results are identical across standard library vendors.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    std::uint64_t next() { return engine_(); }

    /// Uniform draw on the open interval (0, 1).
    double uniform01();

    /// Uniform draw on [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p);

private:
    std::mt19937_64 engine_;
};

/// Mixes a list of values into a seed. Used to split independent streams
/// (per trace, per copy, per individual) off a single experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> values);

}  // namespace padwerk
