// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace mdmsim {

/// Maximal-length Fibonacci LFSR bit stream. Degree 2..31, nonzero seed
/// (the register state); deterministic for fixed (degree, seed). The feedback
/// polynomial per degree is a fixed primitive polynomial, so the period is
/// 2^degree - 1.
std::vector<std::uint8_t> generate_prbs(int degree, std::size_t length, std::uint32_t seed);

} // namespace mdmsim
