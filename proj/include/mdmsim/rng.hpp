// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// xoshiro256++ stream seeded through splitmix64. Hand-rolled so that seeded
/// runs are bit-identical on every platform (std::normal_distribution is
/// implementation-defined and would break reproducible sweeps).
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    /// Standard normal via Box-Muller (caches the spare deviate).
    double normal();
    /// Circular complex Gaussian with E|z|^2 = 1.
    cplx cnormal();

  private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic seed derivation: folds the parts into one 64-bit stream id.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

} // namespace mdmsim
