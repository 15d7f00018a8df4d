// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// Symbol alphabet with bit labeling. Points are normalized to unit mean
/// power; labels are distinct and m bits wide.
struct Constellation {
    std::vector<cplx> points;
    std::vector<std::uint32_t> bit_labels;
    int bits_per_symbol = 0;
    std::string name;

    void validate() const;
    std::size_t size() const { return points.size(); }
    /// Index of the point carrying `label`; throws if absent.
    std::size_t index_of_label(std::uint32_t label) const;
};

/// Circular (4,4) two-ring 8QAM: inner ring on the diagonals, outer ring on
/// the axes with radius ratio (1+sqrt(3))/sqrt(2), quasi-Gray labeling
/// (one ring bit + Gray-coded quadrant). Unit mean power.
Constellation make_8qam_circular();

/// m-bit groups -> labeled points. First bit of each group is the label MSB.
std::vector<cplx> map_symbols(const std::vector<std::uint8_t>& bits, const Constellation& c);

/// Minimum-Euclidean-distance point index.
std::size_t hard_decision_index(const Constellation& c, cplx y);
cplx hard_decision(const Constellation& c, cplx y);

/// Hard demapping back to bits (inverse of map_symbols at zero noise).
std::vector<std::uint8_t> demap_hard(const std::vector<cplx>& symbols, const Constellation& c);

} // namespace mdmsim
