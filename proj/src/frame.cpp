// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/frame.hpp"

#include <stdexcept>

namespace mdmsim {

void ComplexFrame::validate() const {
    if (channels.empty()) throw std::invalid_argument("frame: no channels");
    const std::size_t n = channels.front().size();
    if (n == 0) throw std::invalid_argument("frame: zero length");
    for (const auto& ch : channels)
        if (ch.size() != n) throw std::invalid_argument("frame: ragged channel lengths");
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("frame: sample_rate must be > 0");
}

double ComplexFrame::channel_power(std::size_t ch) const {
    const auto& c = channels.at(ch);
    if (c.empty()) return 0.0;
    double acc = 0.0;
    for (const cplx& v : c) acc += std::norm(v);
    return acc / static_cast<double>(c.size());
}

double ComplexFrame::mean_channel_power() const {
    if (channels.empty()) return 0.0;
    return total_power() / static_cast<double>(channels.size());
}

double ComplexFrame::total_power() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < channels.size(); ++i) acc += channel_power(i);
    return acc;
}

} // namespace mdmsim
