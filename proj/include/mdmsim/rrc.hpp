// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace mdmsim {

struct RrcSpec {
    double roll_off = 0.01;
    int span_symbols = 256;     // must be even; taps cover span_symbols symbol periods
    int samples_per_symbol = 3; // >= 2

    void validate() const;
};

/// Root-raised-cosine taps, length span_symbols*samples_per_symbol + 1,
/// even-symmetric, normalized to unit energy. Cascading two copies gives a
/// Nyquist (zero-ISI) combined response.
std::vector<double> design_rrc(const RrcSpec& spec);

} // namespace mdmsim
