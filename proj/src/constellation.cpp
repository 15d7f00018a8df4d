// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/constellation.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace mdmsim {

void Constellation::validate() const {
    if (bits_per_symbol < 1) throw std::invalid_argument("constellation: bits_per_symbol < 1");
    const std::size_t expected = std::size_t{1} << bits_per_symbol;
    if (points.size() != expected)
        throw std::invalid_argument("constellation: |points| != 2^m");
    if (bit_labels.size() != points.size())
        throw std::invalid_argument("constellation: label count mismatch");
    std::set<std::uint32_t> seen(bit_labels.begin(), bit_labels.end());
    if (seen.size() != bit_labels.size())
        throw std::invalid_argument("constellation: duplicate labels");
    for (std::uint32_t l : bit_labels)
        if (l >= expected) throw std::invalid_argument("constellation: label wider than m bits");
    double p = 0.0;
    for (const cplx& v : points) p += std::norm(v);
    p /= static_cast<double>(points.size());
    if (std::abs(p - 1.0) > 1e-12)
        throw std::invalid_argument("constellation: mean power != 1");
}

std::size_t Constellation::index_of_label(std::uint32_t label) const {
    for (std::size_t i = 0; i < bit_labels.size(); ++i)
        if (bit_labels[i] == label) return i;
    throw std::invalid_argument("constellation: unknown label");
}

Constellation make_8qam_circular() {
    Constellation c;
    c.name = "8qam-circular";
    c.bits_per_symbol = 3;

    // Inner ring (+/-1 +/-1j), outer ring (1+sqrt(3)) on the axes. Labels:
    // bit2 (MSB) = ring, bits1..0 = Gray quadrant counter-clockwise from the
    // positive real axis, so every same-ring neighbor differs in one bit.
    const double outer = 1.0 + std::sqrt(3.0);
    const cplx inner_pts[4] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    const cplx outer_pts[4] = {{outer, 0}, {0, outer}, {-outer, 0}, {0, -outer}};
    const std::uint32_t gray[4] = {0u, 1u, 3u, 2u};

    for (int q = 0; q < 4; ++q) {
        c.points.push_back(inner_pts[q]);
        c.bit_labels.push_back(gray[q]);
    }
    for (int q = 0; q < 4; ++q) {
        c.points.push_back(outer_pts[q]);
        c.bit_labels.push_back(4u | gray[q]);
    }

    double p = 0.0;
    for (const cplx& v : c.points) p += std::norm(v);
    const double scale = 1.0 / std::sqrt(p / static_cast<double>(c.points.size()));
    for (cplx& v : c.points) v *= scale;
    c.validate();
    return c;
}

std::vector<cplx> map_symbols(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    c.validate();
    const int m = c.bits_per_symbol;
    if (bits.size() % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("map_symbols: bit count not divisible by bits_per_symbol");

    std::vector<std::size_t> index_by_label(c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) index_by_label[c.bit_labels[i]] = i;

    const std::size_t n = bits.size() / static_cast<std::size_t>(m);
    std::vector<cplx> out(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::uint32_t label = 0;
        for (int b = 0; b < m; ++b)
            label = (label << 1) | (bits[s * m + b] & 1u);
        out[s] = c.points[index_by_label[label]];
    }
    return out;
}

std::size_t hard_decision_index(const Constellation& c, cplx y) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const double d = std::norm(y - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

cplx hard_decision(const Constellation& c, cplx y) {
    return c.points[hard_decision_index(c, y)];
}

std::vector<std::uint8_t> demap_hard(const std::vector<cplx>& symbols, const Constellation& c) {
    const int m = c.bits_per_symbol;
    std::vector<std::uint8_t> bits(symbols.size() * static_cast<std::size_t>(m));
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const std::uint32_t label = c.bit_labels[hard_decision_index(c, symbols[s])];
        for (int b = 0; b < m; ++b)
            bits[s * m + b] = static_cast<std::uint8_t>((label >> (m - 1 - b)) & 1u);
    }
    return bits;
}

} // namespace mdmsim
