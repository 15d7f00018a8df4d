// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/prbs.hpp"

#include <bit>
#include <stdexcept>

namespace mdmsim {

namespace {

// Primitive-polynomial tap positions (1-based, XAPP052 table), degrees 2..31.
constexpr std::uint8_t kTaps[32][4] = {
    {}, {},
    {2, 1, 0, 0},   {3, 2, 0, 0},   {4, 3, 0, 0},   {5, 3, 0, 0},
    {6, 5, 0, 0},   {7, 6, 0, 0},   {8, 6, 5, 4},   {9, 5, 0, 0},
    {10, 7, 0, 0},  {11, 9, 0, 0},  {12, 6, 4, 1},  {13, 4, 3, 1},
    {14, 5, 3, 1},  {15, 14, 0, 0}, {16, 15, 13, 4}, {17, 14, 0, 0},
    {18, 11, 0, 0}, {19, 6, 2, 1},  {20, 17, 0, 0}, {21, 19, 0, 0},
    {22, 21, 0, 0}, {23, 18, 0, 0}, {24, 23, 22, 17}, {25, 22, 0, 0},
    {26, 6, 2, 1},  {27, 5, 2, 1},  {28, 25, 0, 0}, {29, 27, 0, 0},
    {30, 6, 4, 1},  {31, 28, 0, 0},
};

} // namespace

std::vector<std::uint8_t> generate_prbs(int degree, std::size_t length, std::uint32_t seed) {
    if (degree < 2 || degree > 31) throw std::invalid_argument("prbs: degree must be in [2, 31]");
    const std::uint32_t mask = (degree == 31) ? 0x7fffffffu : ((1u << degree) - 1u);
    if ((seed & mask) == 0) throw std::invalid_argument("prbs: seed must be nonzero");

    std::uint32_t tap_mask = 0;
    for (std::uint8_t t : kTaps[degree])
        if (t != 0) tap_mask |= 1u << (t - 1);

    std::uint32_t state = seed & mask;
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        const std::uint8_t fb = static_cast<std::uint8_t>(std::popcount(state & tap_mask) & 1);
        state = ((state << 1) | fb) & mask;
        bits[i] = fb;
    }
    return bits;
}

} // namespace mdmsim
