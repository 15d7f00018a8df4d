// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mdmsim {

using cplx = std::complex<double>;

/// Multi-channel block of complex baseband samples on one common sample grid.
/// Sample 0 is the frame time origin; every operation in the chain preserves
/// that origin (group delays are compensated), so sample n sits at t = n/fs.
struct ComplexFrame {
    std::vector<std::vector<cplx>> channels;
    double sample_rate_hz = 0.0;
    double center_offset_hz = 0.0;

    ComplexFrame() = default;
    ComplexFrame(std::size_t n_channels, std::size_t n_samples, double rate)
        : channels(n_channels, std::vector<cplx>(n_samples)), sample_rate_hz(rate) {}

    std::size_t channel_count() const { return channels.size(); }
    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }

    /// Throws std::invalid_argument if channels are ragged, empty, or the
    /// sample rate is not positive.
    void validate() const;

    double channel_power(std::size_t ch) const;
    double mean_channel_power() const;
    double total_power() const;
};

} // namespace mdmsim
